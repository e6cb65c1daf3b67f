#pragma once

#include <cstdint>
#include <vector>

#include "ssr/ensembles.hpp"
#include "ssr/linalg.hpp"

namespace ssr {

/// A k-sparse signal in R^n: strictly increasing support indices and the
/// aligned nonzero values.
struct SparseSignal {
    int n = 0;
    std::vector<int> support; // strictly increasing, size k, indices in [0, n)
    std::vector<double> values; // nonzero, aligned with support

    int k() const { return static_cast<int>(support.size()); }
    double energy() const;        // P = sum of squared values
    double min_magnitude() const; // mu = min |value|
    Vector dense() const;         // length-n embedding

    /// Validates the type invariants; throws ParameterError on violation.
    static SparseSignal make(int n, std::vector<int> support, std::vector<double> values);
};

struct NoiseModel {
    double sigma_sq = 1.0; // per-coordinate variance of the additive Gaussian noise
};

/// Nonzero gain magnitudes sorted in descending order; the weakest gain
/// alpha_k drives every single-user converse expression.
struct GainProfile {
    std::vector<double> gains; // strictly positive, non-increasing

    int k() const { return static_cast<int>(gains.size()); }
    double alpha_k() const { return gains.back(); }
    double energy() const; // ||gains||^2

    static GainProfile from_values(std::vector<double> magnitudes); // sorts descending
    static GainProfile from_signal(const SparseSignal& x);
    static GainProfile uniform(int k, double value);
};

enum class SignLaw { positive, random_sign };

struct MagnitudeLaw {
    enum class Kind { fixed, uniform };
    Kind kind = Kind::fixed;
    double mu0 = 1.0; // fixed magnitude, or lower endpoint
    double mu1 = 1.0; // upper endpoint (uniform only)
};

/// Synthesize a sparse signal: support uniform over the C(n,k) subsets,
/// magnitudes per `law`, signs per `signs`. Deterministic in seed.
SparseSignal make_signal(int n, int k, const MagnitudeLaw& law, SignLaw signs,
                         std::uint64_t seed);

/// Noisy linear observation y = A x + z with z i.i.d. N(0, sigma_sq).
/// Deterministic in seed.
Vector observe(const MeasurementMatrix& A, const SparseSignal& x,
               const NoiseModel& noise, std::uint64_t seed);

/// Exact support recovery: 1 iff J equals the true support.
bool metric_d1(const SparseSignal& x, const std::vector<int>& J);

/// Partial support recovery: 1 iff |I ∩ J| / k > 1 - alpha, alpha in (0,1).
bool metric_d2(const SparseSignal& x, const std::vector<int>& J, double alpha);

/// Energy recovery: 1 iff the captured energy sum_{i in I∩J} x_i^2 exceeds
/// (1 - eps_energy) * P, eps_energy in (0,1).
bool metric_d3(const SparseSignal& x, const std::vector<int>& J, double eps_energy);

/// |I ∩ J| for a sorted candidate set J.
int support_overlap(const SparseSignal& x, const std::vector<int>& J);

} // namespace ssr
