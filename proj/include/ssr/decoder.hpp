#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssr/ensembles.hpp"
#include "ssr/linalg.hpp"

namespace ssr {

struct TypicalityParams {
    double delta = 0.1;               // typicality slack
    double rank_tol = default_rank_tol;
};

enum class Typicality { typical, atypical, rank_deficient };

/// strict       — decoding counts as correct only when the true support is
///                typical and no other subset is (the union event, so Monte
///                Carlo error rates compare directly to the union bound).
/// first_unique — operational decoder: output the unique typical subset if
///                exactly one exists, otherwise no decision (an error under
///                every metric).
enum class DecodeMode { strict, first_unique };

struct DecodeOutcome {
    std::vector<std::vector<int>> typical_sets; // lexicographic order
    std::int64_t rank_failures = 0;             // candidates failing the rank test
    std::int64_t candidates = 0;                // subsets examined
    std::optional<std::vector<int>> chosen;     // the unique typical set, when exactly one
    DecodeMode mode = DecodeMode::strict;
};

struct EventFlags {
    bool omega0 = false;             // true-support submatrix rank-deficient
    bool omega_I_complement = false; // true support atypical (and not rank-deficient)
    bool omega_J_fired = false;      // some J != I typical

    bool any() const { return omega0 || omega_I_complement || omega_J_fired; }
};

/// Classify a size-k candidate set J against the observation y:
/// rank_deficient when the submatrix A_J is numerically rank-deficient,
/// otherwise typical iff |(1/m)||P_perp y||^2 - ((m-k)/m) sigma_sq| < delta
/// (strict inequality; boundary equality is atypical).
Typicality is_typical(const MeasurementMatrix& A, const std::vector<int>& J,
                      const Vector& y, double sigma_sq, const TypicalityParams& params);

/// Enumerate all size-k subsets of the column indices in lexicographic
/// order, classifying each via is_typical. chosen is the unique typical
/// set when exactly one exists (in either mode). Enumeration order never
/// affects the outcome.
/// Throws ParameterError for k > m or invalid k; BudgetError when
/// C(n,k) > max_subsets.
DecodeOutcome decode_exhaustive(const MeasurementMatrix& A, const Vector& y, int k,
                                double sigma_sq, const TypicalityParams& params,
                                DecodeMode mode, std::int64_t max_subsets = 10'000'000);

/// The three-way error decomposition of an outcome relative to the true
/// support. Requires the same (A, y, sigma_sq, params) the outcome was
/// produced against.
EventFlags classify_events(const MeasurementMatrix& A, const Vector& y, double sigma_sq,
                           const TypicalityParams& params, const DecodeOutcome& outcome,
                           const std::vector<int>& true_support);

/// C(n,k) capped at 2^63-1; used for budget guards.
std::int64_t subset_count(int n, int k);

} // namespace ssr
