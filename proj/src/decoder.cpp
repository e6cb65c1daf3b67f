#include "ssr/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "ssr/errors.hpp"

namespace ssr {

std::int64_t subset_count(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    // C(n,k) capped at INT64_MAX; the budget guard only needs "too big".
    constexpr std::int64_t cap = INT64_MAX;
    unsigned __int128 c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (c > static_cast<unsigned __int128>(cap)) return cap; // C(n-k+i, i) is non-decreasing in i
    }
    return static_cast<std::int64_t>(c);
}

Typicality is_typical(const MeasurementMatrix& A, const std::vector<int>& J,
                      const Vector& y, double sigma_sq, const TypicalityParams& params) {
    const int m = static_cast<int>(A.rows());
    const int k = static_cast<int>(J.size());
    if (k < 1 || k > m)
        throw ParameterError("is_typical: need 1 <= |J| <= m");
    if (y.size() != A.rows())
        throw ParameterError("is_typical: observation length must equal row count");
    if (sigma_sq <= 0.0 || params.delta <= 0.0)
        throw ParameterError("is_typical: sigma_sq and delta must be positive");
    for (int j : J)
        if (j < 0 || j >= A.cols())
            throw ParameterError("is_typical: candidate index out of range");

    Matrix sub(m, k);
    for (int c = 0; c < k; ++c) sub.col(c) = A.body.col(J[c]);

    if (numerical_rank(sub, params.rank_tol) < k)
        return Typicality::rank_deficient;

    double resid;
    try {
        resid = residual_norm_sq(sub, y, params.rank_tol);
    } catch (const RankDeficiencyError&) {
        // The QR and SVD rank decisions can disagree within rounding of the
        // tolerance threshold; treat the borderline case as rank-deficient.
        return Typicality::rank_deficient;
    }

    const double statistic = resid / m - (static_cast<double>(m - k) / m) * sigma_sq;
    return std::abs(statistic) < params.delta ? Typicality::typical : Typicality::atypical;
}

DecodeOutcome decode_exhaustive(const MeasurementMatrix& A, const Vector& y, int k,
                                double sigma_sq, const TypicalityParams& params,
                                DecodeMode mode, std::int64_t max_subsets) {
    const int n = static_cast<int>(A.cols());
    const int m = static_cast<int>(A.rows());
    if (k < 1 || k > n)
        throw ParameterError("decode_exhaustive: need 1 <= k <= n");
    if (k > m)
        throw ParameterError("decode_exhaustive: need k <= m");
    const std::int64_t total = subset_count(n, k);
    if (total > max_subsets)
        throw BudgetError("decode_exhaustive: C(n,k) exceeds the subset budget");

    DecodeOutcome outcome;
    outcome.mode = mode;

    std::vector<int> J(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) J[i] = i;
    for (;;) {
        ++outcome.candidates;
        switch (is_typical(A, J, y, sigma_sq, params)) {
            case Typicality::typical: outcome.typical_sets.push_back(J); break;
            case Typicality::rank_deficient: ++outcome.rank_failures; break;
            case Typicality::atypical: break;
        }

        // Advance to the next combination in lexicographic order.
        int i = k - 1;
        while (i >= 0 && J[i] == n - k + i) --i;
        if (i < 0) break;
        ++J[i];
        for (int j = i + 1; j < k; ++j) J[j] = J[j - 1] + 1;
    }

    if (outcome.typical_sets.size() == 1)
        outcome.chosen = outcome.typical_sets.front();
    return outcome;
}

EventFlags classify_events(const MeasurementMatrix& A, const Vector& y, double sigma_sq,
                           const TypicalityParams& params, const DecodeOutcome& outcome,
                           const std::vector<int>& true_support) {
    std::vector<int> I = true_support;
    std::sort(I.begin(), I.end());

    EventFlags flags;
    switch (is_typical(A, I, y, sigma_sq, params)) {
        case Typicality::rank_deficient: flags.omega0 = true; break;
        case Typicality::atypical: flags.omega_I_complement = true; break;
        case Typicality::typical: break;
    }
    for (const auto& J : outcome.typical_sets) {
        if (J != I) {
            flags.omega_J_fired = true;
            break;
        }
    }
    return flags;
}

} // namespace ssr
