#include "ssr/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ssr/errors.hpp"
#include "ssr/rng.hpp"

namespace ssr {

namespace {

constexpr std::uint64_t salt_v_matrix = 0x31;
constexpr std::uint64_t salt_v_noise = 0x32;

// log of the sample mean of exp(t * v), max-shifted for stability.
double log_mean_exp(const std::vector<double>& v, double t) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, t * x);
    double acc = 0.0;
    for (double x : v) acc += std::exp(t * x - mx);
    return mx + std::log(acc / static_cast<double>(v.size()));
}

} // namespace

VSampleSet sample_V(const EnsembleSpec& spec, const SparseSignal& x,
                    const std::vector<int>& J, double sigma_sq, int m,
                    std::int64_t trials, std::uint64_t seed, double rank_tol) {
    const int k = x.k();
    if (static_cast<int>(J.size()) != k)
        throw ParameterError("sample_V: |J| must equal |I|");
    if (m < k)
        throw ParameterError("sample_V: need m >= k");
    if (trials < 1'000)
        throw ParameterError("sample_V: need at least 10^3 trials");
    if (sigma_sq <= 0.0)
        throw ParameterError("sample_V: sigma_sq must be positive");
    for (int j : J)
        if (j < 0 || j >= x.n)
            throw ParameterError("sample_V: candidate index out of range");

    std::vector<int> Js = J;
    std::sort(Js.begin(), Js.end());
    if (std::adjacent_find(Js.begin(), Js.end()) != Js.end())
        throw ParameterError("sample_V: candidate indices must be distinct");

    // Only the columns indexed by I ∪ J enter the statistic; a fresh matrix
    // per trial is drawn on those columns alone.
    std::set<int> used(Js.begin(), Js.end());
    used.insert(x.support.begin(), x.support.end());
    std::vector<int> columns(used.begin(), used.end());
    std::vector<int> col_pos(static_cast<std::size_t>(x.n), -1);
    for (std::size_t c = 0; c < columns.size(); ++c) col_pos[columns[c]] = static_cast<int>(c);

    double residual_signal = 0.0; // sum over I \ J of x_i^2
    for (std::size_t i = 0; i < x.support.size(); ++i)
        if (!std::binary_search(Js.begin(), Js.end(), x.support[i]))
            residual_signal += x.values[i] * x.values[i];
    const double sigma_y_sq = residual_signal + sigma_sq;
    const double sigma = std::sqrt(sigma_sq);

    VSampleSet vs;
    vs.gamma1 = static_cast<double>(m - k);
    vs.gamma2 = 2.0;
    vs.meta.spec = spec;
    vs.meta.m = m;
    vs.meta.k = k;
    vs.meta.overlap = support_overlap(x, Js);
    vs.meta.sigma_sq = sigma_sq;
    vs.meta.sigma_y_sq = sigma_y_sq;
    vs.meta.requested_trials = trials;
    vs.samples.reserve(static_cast<std::size_t>(trials));

    const std::uint64_t u = columns.size();
    for (std::int64_t t = 0; t < trials; ++t) {
        EnsembleSpec trial_spec = spec;
        trial_spec.seed = rng::derive(seed, {salt_v_matrix, static_cast<std::uint64_t>(t)});
        const MeasurementMatrix cols = sample_matrix(trial_spec, m, static_cast<int>(u));

        Matrix sub(m, k);
        for (int c = 0; c < k; ++c) sub.col(c) = cols.body.col(col_pos[Js[c]]);
        if (numerical_rank(sub, rank_tol) < k) {
            ++vs.meta.rank_deficient_excluded;
            continue;
        }

        Vector y = Vector::Zero(m);
        for (std::size_t i = 0; i < x.support.size(); ++i)
            y += x.values[i] * cols.body.col(col_pos[x.support[i]]);
        rng::Stream noise(rng::derive(seed, {salt_v_noise, static_cast<std::uint64_t>(t)}));
        for (int i = 0; i < m; ++i) y(i) += sigma * noise.next_normal();

        const double v = residual_norm_sq(sub, y, rank_tol) / sigma_y_sq - (m - k);
        vs.samples.push_back(v);
    }
    return vs;
}

TailBoundReport check_tail_bounds(const VSampleSet& vs, const std::vector<double>& lambda_grid) {
    if (lambda_grid.empty())
        throw ParameterError("check_tail_bounds: empty lambda grid");
    for (double l : lambda_grid)
        if (!(l > 0.0))
            throw ParameterError("check_tail_bounds: lambda values must be positive");
    if (vs.samples.empty())
        throw ParameterError("check_tail_bounds: no samples");

    const double n = static_cast<double>(vs.samples.size());
    TailBoundReport report;
    for (double lambda : lambda_grid) {
        TailBoundRow row;
        row.lambda = lambda;
        row.upper_threshold = vs.gamma2 * lambda + std::sqrt(2.0 * vs.gamma1 * lambda);
        row.lower_threshold = -std::sqrt(2.0 * vs.gamma1 * lambda);
        row.bound = std::exp(-lambda);

        std::int64_t above = 0, below = 0;
        for (double v : vs.samples) {
            if (v >= row.upper_threshold) ++above;
            if (v <= row.lower_threshold) ++below;
        }
        row.upper_freq = above / n;
        row.lower_freq = below / n;

        // A tail is resolvable only when the bound corresponds to a
        // nontrivial expected count at this sample size.
        row.sufficient = n >= 10'000 && row.bound * n >= 10.0;
        if (row.sufficient) {
            const double tol = 3.0 * std::sqrt(row.bound / n);
            row.upper_violation = row.upper_freq > row.bound + tol;
            row.lower_violation = row.lower_freq > row.bound + tol;
            if (row.upper_violation) ++report.violations;
            if (row.lower_violation) ++report.violations;
        }
        report.rows.push_back(row);
    }
    return report;
}

MomentReport check_moment_condition(const VSampleSet& vs, const std::vector<double>& t_grid,
                                    int bootstrap_resamples, std::uint64_t bootstrap_seed) {
    if (t_grid.empty())
        throw ParameterError("check_moment_condition: empty t grid");
    if (vs.samples.size() < 10'000)
        throw ParameterError("check_moment_condition: need at least 10^4 samples");
    for (double t : t_grid)
        if (!(t > -1.0 / vs.gamma2 && t < 1.0 / vs.gamma2))
            throw ParameterError("check_moment_condition: t must lie strictly inside (-1/gamma2, 1/gamma2)");
    if (bootstrap_resamples < 2)
        throw ParameterError("check_moment_condition: need at least 2 bootstrap resamples");

    const std::size_t n = vs.samples.size();
    MomentReport report;
    for (double t : t_grid) {
        MomentRow row;
        row.t = t;
        row.empirical_log_mgf = log_mean_exp(vs.samples, t);
        row.bound = -vs.gamma1 * t - (vs.gamma1 / 2.0) * std::log(1.0 - vs.gamma2 * t);
        row.quad_bound = t < 0.0 ? vs.gamma1 * t * t : std::numeric_limits<double>::quiet_NaN();

        // Bootstrap SE of the log-mean-exponential.
        rng::Stream boot(rng::derive(bootstrap_seed, static_cast<std::uint64_t>(report.rows.size())));
        std::vector<double> resample(n);
        double s1 = 0.0, s2 = 0.0;
        for (int b = 0; b < bootstrap_resamples; ++b) {
            for (std::size_t i = 0; i < n; ++i)
                resample[i] = vs.samples[boot.next_below(n)];
            const double lme = log_mean_exp(resample, t);
            s1 += lme;
            s2 += lme * lme;
        }
        const double mean = s1 / bootstrap_resamples;
        const double var = std::max(0.0, s2 / bootstrap_resamples - mean * mean);
        row.se_bootstrap = std::sqrt(var);

        const double tol = 3.0 * row.se_bootstrap;
        row.violation = row.empirical_log_mgf > row.bound + tol;
        if (t < 0.0)
            row.quad_violation = row.empirical_log_mgf > row.quad_bound + tol;
        if (row.violation) ++report.violations;
        if (row.quad_violation) ++report.violations;
        report.rows.push_back(row);
    }
    return report;
}

double chernoff_rate_objective(double gamma1, double gamma2, double eps, double t) {
    return t * eps - gamma1 * t * t / (2.0 * (1.0 - gamma2 * t));
}

double chernoff_rate_numeric(double gamma1, double gamma2, double eps) {
    if (gamma1 <= 0.0 || gamma2 <= 0.0 || eps <= 0.0)
        throw ParameterError("chernoff_rate_numeric: gamma1, gamma2, eps must be positive");

    // Golden-section search; the objective is concave on (0, 1/gamma2).
    const double hi_edge = 1.0 / gamma2;
    double lo = hi_edge * 1e-15;
    double hi = hi_edge * (1.0 - 1e-15);
    constexpr double inv_phi = 0.6180339887498949;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = chernoff_rate_objective(gamma1, gamma2, eps, a);
    double fb = chernoff_rate_objective(gamma1, gamma2, eps, b);
    while (hi - lo > 1e-14 * hi_edge) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = chernoff_rate_objective(gamma1, gamma2, eps, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = chernoff_rate_objective(gamma1, gamma2, eps, a);
        }
    }
    return std::max(fa, fb);
}

double chernoff_rate_maximizer(double gamma1, double gamma2, double eps) {
    return (1.0 - std::sqrt(gamma1) / std::sqrt(2.0 * eps * gamma2 + gamma1)) / gamma2;
}

RateIdentityRow check_rate_identity(double gamma1, double gamma2, double lambda) {
    if (gamma1 <= 0.0 || gamma2 <= 0.0 || lambda <= 0.0)
        throw ParameterError("check_rate_identity: gamma1, gamma2, lambda must be positive");
    RateIdentityRow row;
    row.gamma1 = gamma1;
    row.gamma2 = gamma2;
    row.lambda = lambda;
    row.eps = gamma2 * lambda + std::sqrt(2.0 * gamma1 * lambda);
    row.rate_numeric = chernoff_rate_numeric(gamma1, gamma2, row.eps);
    row.tstar = chernoff_rate_maximizer(gamma1, gamma2, row.eps);
    row.rate_at_tstar = chernoff_rate_objective(gamma1, gamma2, row.eps, row.tstar);
    return row;
}

} // namespace ssr
