#pragma once

#include <optional>
#include <string>

#include "ssr/signal.hpp"

namespace ssr {

/// Inputs to the achievability-side (union bound) expressions.
struct AchievabilityInputs {
    int n = 0;
    int k = 0;
    int m = 0;
    double sigma_sq = 1.0;
    double delta = 0.1;
    double mu = 1.0;            // smallest nonzero signal magnitude
    double signal_energy = 1.0; // P = total signal energy
    std::optional<double> c0;   // rank-failure exponent, user-supplied only

    static AchievabilityInputs from_signal(int n, int m, double sigma_sq, double delta,
                                           const SparseSignal& x,
                                           std::optional<double> c0 = std::nullopt);
};

/// Inputs to the converse (lower bound on m) expressions.
struct ConverseInputs {
    int n = 0;
    int k = 0;
    GainProfile gains;
    double sigma_sq = 1.0;
};

struct Metric {
    enum class Kind { d1, d2, d3 };
    Kind kind = Kind::d1;
    double param = 0.0; // alpha for d2, eps_energy for d3, unused for d1

    static Metric d1() { return {Kind::d1, 0.0}; }
    static Metric d2(double alpha) { return {Kind::d2, alpha}; }
    static Metric d3(double eps_energy) { return {Kind::d3, eps_energy}; }
    const char* name() const;
};

/// Upper bound on the probability that the true support fails the
/// typicality test: 2 exp(-(delta^2/(4 sigma^4)) * m^2 / (m-k + (2 delta/sigma^2) m)).
/// Requires m > k. May exceed 1 (callers clamp for probability use).
double prob_atypical_bound(int m, int k, double sigma_sq, double delta);

struct WrongSetBound {
    double value = 2.0;
    bool vacuous = false; // residual energy did not exceed delta' = delta*m/(m-k)
};

/// Upper bound on the probability that a wrong candidate set with residual
/// signal energy E is typical: 2 exp(-((m-k)/4) * ((E - delta')/(E + sigma_sq))^2)
/// with delta' = delta*m/(m-k); vacuous (value 2) when E <= delta'.
WrongSetBound prob_wrong_set_bound(int m, int k, double sigma_sq, double delta,
                                   double residual_energy);

struct UnionBoundResult {
    double atypical_term = 0.0;
    double wrong_set_term = 0.0;     // sum over overlap classes, log-domain accumulation
    double log_wrong_set_term = 0.0; // natural log of the above
    std::optional<double> rank_term; // exp(-c0 m), present only when c0 supplied
    double total = 0.0;              // atypical + wrong-set (+ rank term when present)
    bool any_vacuous = false;        // some overlap class had E_p <= delta'
    int vacuous_classes = 0;
    bool vacuous_as_probability() const { return total >= 1.0; }
};

/// Union bound on the decoding error for the given metric:
///   rank term (when c0 given) + atypicality term
///   + sum over overlaps p of C(k,p) C(n-k,k-p) * wrong-set bound at E_p,
/// where the metric fixes the error-relevant overlap range and the
/// residual-energy floor E_p:
///   d1: p in [0, k-1],                    E_p = (k-p) mu^2
///   d2: p in [0, floor((1-alpha) k)],     E_p = alpha k mu^2
///   d3: p in [0, k-1],                    E_p = eps_energy * P
/// Counting is done with log-binomials and log-sum-exp so large (n,k)
/// never overflow.
UnionBoundResult union_bound(const AchievabilityInputs& in, const Metric& metric);

/// Sum capacity of the k-user Gaussian MAC with gains `g`:
/// (1/2) ln(1 + ||g||^2 / sigma_sq), in nats per channel use.
/// Invariant under permutation of the gains.
double cmac_sumrate_gaussian(const GainProfile& g, double sigma_sq);

/// Generic measurement-count floor m >= k ln(n/k) / r_cmac (r_cmac in nats).
double converse_general(int n, int k, double r_cmac_nats);

struct GaussianConverse {
    double term_single_user = 0.0;   // 2 log(n/k) / log(1 + alpha_k^2/sigma^2)
    double term_sum_rate = 0.0;      // 2k log(n/k) / log(1 + ||gains||^2/sigma^2)
    double two_term_max = 0.0;       // max of the two terms above
    double refined_single_user = 0.0; // log(n-k+1) / log(1 + alpha_k^2/sigma^2)
    double low_snr = 0.0;            // sigma_sq ln(n/k) / alpha_k^2
    bool low_snr_valid = false;      // alpha_k^2/sigma_sq < 0.1
};

/// Gaussian-ensemble converse bounds. The first two expressions are ratios
/// of logarithms (base-invariant); low_snr uses natural log.
GaussianConverse converse_gaussian(const ConverseInputs& in);

/// Sign-matrix converse via the k-user binary adder channel:
/// m >= 2k log2(n/k) / log2(pi e k / 2).
double converse_bernoulli(int n, int k);

/// Cutoff rate of a scalar AWGN channel at SNR alpha^2/sigma_sq, fixed here
/// to the Gaussian-input form E0 = (1/2) ln(1 + SNR/2). Recorded in output
/// metadata as an interpretation choice.
double awgn_cutoff_rate(double alpha, double sigma_sq);
inline constexpr const char* cutoff_rate_form = "E0 = 0.5*ln(1 + snr/2) (Gaussian-input cutoff rate)";

/// Floor on the recovery error probability: exp(-E0(alpha_k, sigma_sq) * m).
/// m = 0 degenerates to 1 (vacuous floor).
double error_exponent_floor(int m, double alpha_k, double sigma_sq);

/// log C(n,k) via lgamma; -inf when k < 0 or k > n.
double log_binomial(int n, int k);

} // namespace ssr
