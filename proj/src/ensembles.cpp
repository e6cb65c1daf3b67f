#include "ssr/ensembles.hpp"

#include <cmath>

#include "ssr/errors.hpp"
#include "ssr/rng.hpp"

namespace ssr {

namespace {

constexpr double sqrt3 = 1.7320508075688772;

double draw_entry(EnsembleKind kind, rng::Stream& stream) {
    switch (kind) {
        case EnsembleKind::gaussian: return stream.next_normal();
        case EnsembleKind::rademacher: return stream.next_sign();
        case EnsembleKind::uniform_pm: return stream.next_uniform(-sqrt3, sqrt3);
    }
    throw ParameterError("unknown ensemble kind");
}

// Salts separating the independent substream families of this module.
constexpr std::uint64_t salt_matrix = 0x11;
constexpr std::uint64_t salt_tail = 0x12;
constexpr std::uint64_t salt_sweep = 0x13;

} // namespace

const char* to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::gaussian: return "gaussian";
        case EnsembleKind::rademacher: return "rademacher";
        case EnsembleKind::uniform_pm: return "uniform_pm";
    }
    return "?";
}

const char* to_string(Normalization norm) {
    switch (norm) {
        case Normalization::unit_column: return "unit_column";
        case Normalization::root_m_column: return "root_m_column";
        case Normalization::raw: return "raw";
    }
    return "?";
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
    if (s == "gaussian") return EnsembleKind::gaussian;
    if (s == "rademacher") return EnsembleKind::rademacher;
    if (s == "uniform_pm") return EnsembleKind::uniform_pm;
    throw ParameterError("unknown ensemble kind: " + s);
}

Normalization normalization_from_string(const std::string& s) {
    if (s == "unit_column") return Normalization::unit_column;
    if (s == "root_m_column") return Normalization::root_m_column;
    if (s == "raw") return Normalization::raw;
    throw ParameterError("unknown normalization: " + s);
}

double default_subgaussian_moment(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::gaussian: return std::sqrt(2.0);
        case EnsembleKind::rademacher: return 1.0;
        case EnsembleKind::uniform_pm: return sqrt3; // bounded by sqrt(3)
    }
    throw ParameterError("unknown ensemble kind");
}

MeasurementMatrix sample_matrix(const EnsembleSpec& spec, int m, int n) {
    if (m < 1 || n < 1)
        throw ParameterError("sample_matrix: m and n must be positive");

    rng::Stream stream(rng::derive(spec.seed, salt_matrix));
    Matrix body(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i)
            body(i, j) = draw_entry(spec.kind, stream);

    if (spec.normalization != Normalization::raw) {
        const double target = spec.normalization == Normalization::unit_column
                                  ? 1.0
                                  : std::sqrt(static_cast<double>(m));
        for (int j = 0; j < n; ++j) {
            const double norm = body.col(j).norm();
            if (norm == 0.0)
                throw Error("sample_matrix: zero column cannot be normalized");
            body.col(j) *= target / norm;
        }
    }
    return {std::move(body), spec};
}

SubgaussianTailReport empirical_subgaussian_tail(const EnsembleSpec& spec,
                                                 std::int64_t samples,
                                                 const std::vector<double>& t_grid,
                                                 double subgauss_moment) {
    if (t_grid.empty())
        throw ParameterError("empirical_subgaussian_tail: empty t grid");
    if (samples < 10'000)
        throw ParameterError("empirical_subgaussian_tail: need at least 10^4 samples");
    for (double t : t_grid)
        if (!(t >= 0.0))
            throw ParameterError("empirical_subgaussian_tail: t values must be nonnegative");

    const double B = subgauss_moment > 0.0 ? subgauss_moment : default_subgaussian_moment(spec.kind);

    std::vector<std::int64_t> counts(t_grid.size(), 0);
    rng::Stream stream(rng::derive(spec.seed, salt_tail));
    for (std::int64_t s = 0; s < samples; ++s) {
        const double x = std::abs(draw_entry(spec.kind, stream));
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            if (x >= t_grid[i]) ++counts[i];
    }

    SubgaussianTailReport report;
    report.subgauss_moment = B;
    report.samples = samples;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        SubgaussianTailPoint p;
        p.t = t_grid[i];
        p.empirical = static_cast<double>(counts[i]) / static_cast<double>(samples);
        p.bound = 2.0 * std::exp(-p.t * p.t / (B * B));
        p.violation = p.empirical > p.bound + 3.0 * std::sqrt(p.bound / static_cast<double>(samples));
        if (p.violation) ++report.violations;
        report.points.push_back(p);
    }
    return report;
}

SingularSweepReport smallest_singular_sweep(const EnsembleSpec& spec, int k,
                                            const std::vector<int>& m_grid,
                                            std::int64_t trials, double rank_tol) {
    if (k < 1)
        throw ParameterError("smallest_singular_sweep: k must be positive");
    if (m_grid.empty())
        throw ParameterError("smallest_singular_sweep: empty m grid");
    if (trials < 1'000)
        throw ParameterError("smallest_singular_sweep: need at least 10^3 trials");
    for (int m : m_grid)
        if (m < k)
            throw ParameterError("smallest_singular_sweep: every m must be >= k");

    SingularSweepReport report;
    for (int m : m_grid) {
        std::int64_t deficient = 0;
        for (std::int64_t t = 0; t < trials; ++t) {
            EnsembleSpec trial_spec = spec;
            trial_spec.seed = rng::derive(spec.seed, {salt_sweep, static_cast<std::uint64_t>(m),
                                                      static_cast<std::uint64_t>(t)});
            const MeasurementMatrix X = sample_matrix(trial_spec, m, k);
            if (numerical_rank(X.body, rank_tol) < k) ++deficient;
        }
        report.points.push_back({m, static_cast<double>(deficient) / static_cast<double>(trials)});
    }

    // Fit log(freq) against m where the frequency is resolvable.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (const auto& p : report.points) {
        if (p.rank_deficient_freq <= 0.0) continue;
        const double x = p.m, y = std::log(p.rank_deficient_freq);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++npts;
    }
    report.fit_points = npts;
    if (npts >= 2) {
        const double denom = npts * sxx - sx * sx;
        if (denom != 0.0) {
            report.fit_slope = (npts * sxy - sx * sy) / denom;
            report.fit_intercept = (sy - report.fit_slope * sx) / npts;
        }
    }
    return report;
}

} // namespace ssr
