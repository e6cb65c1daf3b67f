#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssr/linalg.hpp"

namespace ssr {

/// Entry laws. All three are zero-mean, unit-variance, subgaussian:
///   gaussian   — standard normal
///   rademacher — +1/-1 with probability 1/2 each
///   uniform_pm — uniform on [-sqrt(3), +sqrt(3)]
enum class EnsembleKind { gaussian, rademacher, uniform_pm };

/// Column scaling applied after the i.i.d. entries are drawn:
///   unit_column   — every column rescaled to unit l2 norm (decoding default)
///   root_m_column — every column rescaled so (1/m)*||a_i||^2 = 1
///   raw           — entries kept as drawn (unit entry variance)
enum class Normalization { unit_column, root_m_column, raw };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::gaussian;
    std::uint64_t seed = 0;
    Normalization normalization = Normalization::unit_column;
};

struct MeasurementMatrix {
    Matrix body; // m x n
    EnsembleSpec spec;

    Eigen::Index rows() const { return body.rows(); }
    Eigen::Index cols() const { return body.cols(); }
};

const char* to_string(EnsembleKind kind);
const char* to_string(Normalization norm);
EnsembleKind ensemble_kind_from_string(const std::string& s);
Normalization normalization_from_string(const std::string& s);

/// Subgaussian moment B such that Pr(|x| >= t) <= 2 exp(-t^2/B^2) holds for
/// the raw (unnormalized) entry law of `kind`.
double default_subgaussian_moment(EnsembleKind kind);

/// Draw an m x n matrix with i.i.d. entries per spec.kind, then rescale
/// columns per spec.normalization. Deterministic in (spec, m, n): the same
/// seed reproduces the identical matrix bit for bit.
MeasurementMatrix sample_matrix(const EnsembleSpec& spec, int m, int n);

struct SubgaussianTailPoint {
    double t = 0.0;
    double empirical = 0.0; // fraction of draws with |x| >= t
    double bound = 0.0;     // 2 exp(-t^2/B^2)
    bool violation = false; // empirical > bound + 3*sqrt(bound/samples)
};

struct SubgaussianTailReport {
    std::vector<SubgaussianTailPoint> points;
    double subgauss_moment = 0.0;
    std::int64_t samples = 0;
    int violations = 0;
};

/// Empirical check of the subgaussian tail inequality for the raw entry law.
/// `subgauss_moment` of 0 selects the per-kind default. Requires
/// samples >= 10^4 and a nonempty grid of positive t values.
SubgaussianTailReport empirical_subgaussian_tail(const EnsembleSpec& spec,
                                                 std::int64_t samples,
                                                 const std::vector<double>& t_grid,
                                                 double subgauss_moment = 0.0);

struct SingularSweepPoint {
    int m = 0;
    double rank_deficient_freq = 0.0;
};

struct SingularSweepReport {
    std::vector<SingularSweepPoint> points;
    // Least-squares fit of log(freq) against m over the points with
    // nonzero frequency; meaningful only when fit_points >= 2.
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
    int fit_points = 0;
};

/// For each m in the grid, the fraction of `trials` independent m x k
/// matrices from the ensemble that are numerically rank-deficient.
/// Requires trials >= 10^3 and every m >= k.
SingularSweepReport smallest_singular_sweep(const EnsembleSpec& spec, int k,
                                            const std::vector<int>& m_grid,
                                            std::int64_t trials,
                                            double rank_tol = default_rank_tol);

} // namespace ssr
