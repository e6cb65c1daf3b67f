#include "ssr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void check_point(int m, int k, double sigma_sq, double delta) {
    if (k < 1)
        throw ParameterError("k must be positive");
    if (m <= k)
        throw ParameterError("need m > k");
    if (sigma_sq <= 0.0)
        throw ParameterError("sigma_sq must be positive");
    if (delta <= 0.0)
        throw ParameterError("delta must be positive");
}

// log(sum exp(terms)) without overflow; -inf for an empty/all-(-inf) list.
double log_sum_exp(const std::vector<double>& terms) {
    double mx = neg_inf;
    for (double t : terms) mx = std::max(mx, t);
    if (mx == neg_inf) return neg_inf;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - mx);
    return mx + std::log(acc);
}

} // namespace

const char* Metric::name() const {
    switch (kind) {
        case Kind::d1: return "d1";
        case Kind::d2: return "d2";
        case Kind::d3: return "d3";
    }
    return "?";
}

AchievabilityInputs AchievabilityInputs::from_signal(int n, int m, double sigma_sq,
                                                     double delta, const SparseSignal& x,
                                                     std::optional<double> c0) {
    return AchievabilityInputs{n, x.k(), m, sigma_sq, delta, x.min_magnitude(), x.energy(), c0};
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) return neg_inf;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double prob_atypical_bound(int m, int k, double sigma_sq, double delta) {
    check_point(m, k, sigma_sq, delta);
    const double md = m;
    const double exponent = (delta * delta / (4.0 * sigma_sq * sigma_sq)) * md * md /
                            (md - k + (2.0 * delta / sigma_sq) * md);
    return 2.0 * std::exp(-exponent);
}

WrongSetBound prob_wrong_set_bound(int m, int k, double sigma_sq, double delta,
                                   double residual_energy) {
    check_point(m, k, sigma_sq, delta);
    if (residual_energy < 0.0)
        throw ParameterError("prob_wrong_set_bound: residual energy must be nonnegative");
    const double delta_prime = delta * m / static_cast<double>(m - k);
    if (residual_energy <= delta_prime)
        return {2.0, true};
    const double ratio = (residual_energy - delta_prime) / (residual_energy + sigma_sq);
    return {2.0 * std::exp(-(static_cast<double>(m - k) / 4.0) * ratio * ratio), false};
}

UnionBoundResult union_bound(const AchievabilityInputs& in, const Metric& metric) {
    check_point(in.m, in.k, in.sigma_sq, in.delta);
    if (in.n <= in.k)
        throw ParameterError("union_bound: need n > k");
    if (in.mu <= 0.0)
        throw ParameterError("union_bound: mu must be positive");

    // Error-relevant overlap range and per-class residual-energy floor.
    int p_max = in.k - 1;
    double fixed_energy = 0.0; // d2/d3 use one floor for every class
    switch (metric.kind) {
        case Metric::Kind::d1:
            break;
        case Metric::Kind::d2: {
            if (!(metric.param > 0.0 && metric.param < 1.0))
                throw ParameterError("union_bound: d2 alpha must lie in (0,1)");
            // (1-alpha)k may be non-integer; floor, guarded against the
            // representation of (1-alpha) landing a hair under an integer.
            p_max = std::min(in.k - 1,
                             static_cast<int>(std::floor((1.0 - metric.param) * in.k + 1e-9)));
            fixed_energy = metric.param * in.k * in.mu * in.mu;
            break;
        }
        case Metric::Kind::d3:
            if (!(metric.param > 0.0 && metric.param < 1.0))
                throw ParameterError("union_bound: d3 eps_energy must lie in (0,1)");
            if (in.signal_energy <= 0.0)
                throw ParameterError("union_bound: signal energy must be positive");
            fixed_energy = metric.param * in.signal_energy;
            break;
    }

    UnionBoundResult result;
    result.atypical_term = prob_atypical_bound(in.m, in.k, in.sigma_sq, in.delta);

    std::vector<double> log_terms;
    for (int p = 0; p <= p_max; ++p) {
        const double log_count = log_binomial(in.k, p) + log_binomial(in.n - in.k, in.k - p);
        if (log_count == neg_inf) continue; // no set has this overlap
        const double energy = metric.kind == Metric::Kind::d1
                                  ? (in.k - p) * in.mu * in.mu
                                  : fixed_energy;
        const WrongSetBound per_set = prob_wrong_set_bound(in.m, in.k, in.sigma_sq, in.delta, energy);
        if (per_set.vacuous) {
            result.any_vacuous = true;
            ++result.vacuous_classes;
        }
        log_terms.push_back(log_count + std::log(per_set.value));
    }
    result.log_wrong_set_term = log_sum_exp(log_terms);
    result.wrong_set_term =
        result.log_wrong_set_term == neg_inf ? 0.0 : std::exp(result.log_wrong_set_term);

    result.total = result.atypical_term + result.wrong_set_term;
    if (in.c0) {
        if (*in.c0 <= 0.0)
            throw ParameterError("union_bound: c0 must be positive");
        result.rank_term = std::exp(-(*in.c0) * in.m);
        result.total += *result.rank_term;
    }
    return result;
}

double cmac_sumrate_gaussian(const GainProfile& g, double sigma_sq) {
    if (sigma_sq <= 0.0)
        throw ParameterError("cmac_sumrate_gaussian: sigma_sq must be positive");
    return 0.5 * std::log1p(g.energy() / sigma_sq);
}

double converse_general(int n, int k, double r_cmac_nats) {
    if (k < 1 || k >= n)
        throw ParameterError("converse_general: need 0 < k < n");
    if (r_cmac_nats <= 0.0)
        throw ParameterError("converse_general: sum rate must be positive");
    return k * std::log(static_cast<double>(n) / k) / r_cmac_nats;
}

GaussianConverse converse_gaussian(const ConverseInputs& in) {
    if (in.k < 1 || in.k >= in.n)
        throw ParameterError("converse_gaussian: need 0 < k < n");
    if (in.sigma_sq <= 0.0)
        throw ParameterError("converse_gaussian: sigma_sq must be positive");
    if (in.gains.k() != in.k)
        throw ParameterError("converse_gaussian: gains length must equal k");

    const double log_nk = std::log(static_cast<double>(in.n) / in.k);
    const double snr_min = in.gains.alpha_k() * in.gains.alpha_k() / in.sigma_sq;
    const double snr_sum = in.gains.energy() / in.sigma_sq;

    GaussianConverse out;
    out.term_single_user = 2.0 * log_nk / std::log1p(snr_min);
    out.term_sum_rate = 2.0 * in.k * log_nk / std::log1p(snr_sum);
    out.two_term_max = std::max(out.term_single_user, out.term_sum_rate);
    out.refined_single_user = std::log(static_cast<double>(in.n) - in.k + 1.0) / std::log1p(snr_min);
    out.low_snr = in.sigma_sq * log_nk / (in.gains.alpha_k() * in.gains.alpha_k());
    out.low_snr_valid = snr_min < 0.1;
    return out;
}

double converse_bernoulli(int n, int k) {
    if (k < 1 || k >= n)
        throw ParameterError("converse_bernoulli: need 0 < k < n");
    const double denom_arg = std::numbers::pi * std::numbers::e * k / 2.0;
    if (denom_arg <= 1.0)
        throw ParameterError("converse_bernoulli: pi*e*k/2 must exceed 1");
    return 2.0 * k * std::log2(static_cast<double>(n) / k) / std::log2(denom_arg);
}

double awgn_cutoff_rate(double alpha, double sigma_sq) {
    if (sigma_sq <= 0.0)
        throw ParameterError("awgn_cutoff_rate: sigma_sq must be positive");
    return 0.5 * std::log1p(alpha * alpha / (2.0 * sigma_sq));
}

double error_exponent_floor(int m, double alpha_k, double sigma_sq) {
    if (m < 0)
        throw ParameterError("error_exponent_floor: m must be nonnegative");
    if (m == 0) return 1.0;
    return std::exp(-awgn_cutoff_rate(alpha_k, sigma_sq) * m);
}

} // namespace ssr
