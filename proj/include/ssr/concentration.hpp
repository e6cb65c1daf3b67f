#pragma once

#include <cstdint>
#include <vector>

#include "ssr/ensembles.hpp"
#include "ssr/signal.hpp"

namespace ssr {

struct VSampleMeta {
    EnsembleSpec spec;
    int m = 0;
    int k = 0;
    int overlap = 0; // |I ∩ J|
    double sigma_sq = 1.0;
    double sigma_y_sq = 1.0; // sum_{i in I\J} x_i^2 + sigma_sq
    std::int64_t requested_trials = 0;
    std::int64_t rank_deficient_excluded = 0;
};

/// Monte Carlo draws of the centered residual statistic
///   V = ||P_perp_{A_J} y||^2 / sigma_y^2 - (m-k),
/// the object of the Chernoff tail and moment checks. gamma1 = m-k and
/// gamma2 = 2 is the regime in which the subgaussian tail claims apply
/// (unit-variance entries, i.e. raw or root_m_column normalization).
struct VSampleSet {
    double gamma1 = 0.0;
    double gamma2 = 2.0;
    std::vector<double> samples;
    VSampleMeta meta;
};

/// Draw `trials` independent realizations of V: fresh measurement columns
/// and noise each trial, candidate set J fixed. Rank-deficient draws are
/// excluded from the samples but counted in meta. Requires |J| = |I|,
/// trials >= 10^3, m >= |J|.
VSampleSet sample_V(const EnsembleSpec& spec, const SparseSignal& x,
                    const std::vector<int>& J, double sigma_sq, int m,
                    std::int64_t trials, std::uint64_t seed,
                    double rank_tol = default_rank_tol);

struct TailBoundRow {
    double lambda = 0.0;
    double upper_threshold = 0.0; // gamma2*lambda + sqrt(2*gamma1*lambda)
    double lower_threshold = 0.0; // -sqrt(2*gamma1*lambda)
    double upper_freq = 0.0;      // fraction of samples with V >= upper_threshold
    double lower_freq = 0.0;      // fraction of samples with V <= lower_threshold
    double bound = 0.0;           // exp(-lambda)
    bool upper_violation = false;
    bool lower_violation = false;
    bool sufficient = true; // enough samples to resolve the tail at this lambda
};

struct TailBoundReport {
    std::vector<TailBoundRow> rows;
    int violations = 0;
};

/// Check the two Chernoff tail bounds
///   Pr(V >= gamma2*lambda + sqrt(2*gamma1*lambda)) <= exp(-lambda)
///   Pr(V <= -sqrt(2*gamma1*lambda))                <= exp(-lambda)
/// against the sampled V. A violation fires when the empirical frequency
/// exceeds the bound by more than 3 binomial standard errors. A lambda is
/// marked insufficient (and not flagged) when samples < 10^4 or fewer than
/// ~10 exceedances would be expected at the bound.
TailBoundReport check_tail_bounds(const VSampleSet& vs, const std::vector<double>& lambda_grid);

struct MomentRow {
    double t = 0.0;
    double empirical_log_mgf = 0.0;
    double bound = 0.0;      // -gamma1*t - (gamma1/2) ln(1 - gamma2*t)
    double quad_bound = 0.0; // gamma1*t^2, applicable for t < 0 only (NaN otherwise)
    double se_bootstrap = 0.0;
    bool violation = false;
    bool quad_violation = false;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    int violations = 0;
};

/// Check the moment condition log E[e^{tV}] <= -gamma1*t - (gamma1/2) ln(1 - gamma2*t)
/// (and, for t < 0, the quadratic bound gamma1*t^2) on the sampled V.
/// Every t must lie strictly inside (-1/gamma2, 1/gamma2). Violations are
/// flagged beyond 3 bootstrap standard errors.
MomentReport check_moment_condition(const VSampleSet& vs, const std::vector<double>& t_grid,
                                    int bootstrap_resamples = 100,
                                    std::uint64_t bootstrap_seed = 0x5eedb001);

/// The Chernoff rate objective f(t) = t*eps - gamma1*t^2 / (2 (1 - gamma2*t)),
/// concave on (0, 1/gamma2).
double chernoff_rate_objective(double gamma1, double gamma2, double eps, double t);

/// sup of the objective over t in (0, 1/gamma2), by golden-section search.
double chernoff_rate_numeric(double gamma1, double gamma2, double eps);

/// Closed-form maximizer t* = (1/gamma2) (1 - sqrt(gamma1) / sqrt(2*eps*gamma2 + gamma1)).
double chernoff_rate_maximizer(double gamma1, double gamma2, double eps);

struct RateIdentityRow {
    double gamma1 = 0.0, gamma2 = 0.0, lambda = 0.0;
    double eps = 0.0;        // gamma2*lambda + sqrt(2*gamma1*lambda)
    double rate_numeric = 0.0;
    double rate_at_tstar = 0.0;
    double tstar = 0.0;
};

/// Deterministic verification data for the identity "rate(eps) = lambda at
/// eps = gamma2*lambda + sqrt(2*gamma1*lambda)" and for the closed-form
/// maximizer. No sampling involved.
RateIdentityRow check_rate_identity(double gamma1, double gamma2, double lambda);

} // namespace ssr
