#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssr/bounds.hpp"
#include "ssr/decoder.hpp"
#include "ssr/ensembles.hpp"
#include "ssr/signal.hpp"

namespace ssr {

enum class OutputFormat { csv, json };
OutputFormat output_format_from_string(const std::string& s);

/// A full experiment description: one JSON document is the single source
/// of truth; CLI flags override individual keys.
struct SweepConfig {
    EnsembleKind ensemble = EnsembleKind::gaussian;
    Normalization normalization = Normalization::unit_column;
    std::vector<int> n_grid{12};
    std::vector<int> k_grid{2};
    std::vector<int> m_grid{24};
    double sigma_sq = 1.0;
    double delta = 0.1;
    double alpha = 0.1;      // metric d2 parameter
    double eps_energy = 0.1; // metric d3 parameter
    MagnitudeLaw magnitude;
    SignLaw signs = SignLaw::positive;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    DecodeMode mode = DecodeMode::strict;
    std::int64_t max_subsets = 10'000'000;
    int workers = 1;
    double rank_tol = default_rank_tol;
    std::optional<double> c0; // rank-failure exponent for the union bound

    TypicalityParams typicality() const { return {delta, rank_tol}; }

    /// Validates invariants (grids nonempty, m >= k for every combination,
    /// C(n,k) within max_subsets, parameters in range); throws ParameterError.
    void validate() const;

    static SweepConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static SweepConfig load(const std::string& path); // IoError / ParameterError
};

/// One Monte Carlo trial: which error events fired and the per-metric
/// success bits. In strict mode the three bits coincide (the decoder either
/// reproduces the true support exactly or the trial is an error); in
/// first_unique mode the metrics are evaluated on the chosen set.
struct TrialRecord {
    std::int64_t trial = 0;
    bool omega0 = false;
    bool omega_I_c = false;
    bool omega_J = false;
    bool d1 = false, d2 = false, d3 = false;
    int overlap = -1; // |I ∩ chosen|, -1 when no decision
};

struct PointAggregate {
    int n = 0, k = 0, m = 0;
    double sigma_sq = 0.0, delta = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0; // master seed of the run
    double err_d1 = 0.0, err_d2 = 0.0, err_d3 = 0.0;
    double se_d1 = 0.0, se_d2 = 0.0, se_d3 = 0.0;
    double omega0_rate = 0.0, omegaIc_rate = 0.0, omegaJ_rate = 0.0;

    double err(Metric::Kind kind) const;
    double se(Metric::Kind kind) const;
};

struct PointResult {
    PointAggregate agg;
    std::vector<TrialRecord> records;
};

/// Monte Carlo error-rate estimation at a single (n, k, m) grid point.
/// Deterministic in the master seed: per-trial substreams are derived from
/// (seed, n, k, m, trial), so results are independent of worker count and
/// of any other grid points in the sweep.
PointResult run_point(const SweepConfig& cfg, int n, int k, int m);

/// One emitted row: a (point, metric) pair.
struct ResultRow {
    int n = 0, k = 0, m = 0;
    double sigma_sq = 0.0, delta = 0.0;
    std::string metric; // "d1" | "d2" | "d3"
    double param = 0.0; // 0 for d1, alpha for d2, eps_energy for d3
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double err_rate = 0.0, se = 0.0;
    double omega0_rate = 0.0, omegaIc_rate = 0.0, omegaJ_rate = 0.0;
    double union_bound = 0.0;
    bool vacuous_flag = false; // union bound >= 1
};

struct SweepResult {
    std::vector<ResultRow> rows; // canonical order: sorted by (n, k, m, metric)
    std::vector<std::string> skipped; // points skipped with the recorded reason
};

/// Run every grid point and produce the emitted rows (three per point).
/// Budget overruns record a skip and continue.
SweepResult run_sweep(const SweepConfig& cfg);

/// Side-by-side comparison of empirical error rates with the closed-form
/// achievability and converse expressions at each grid point.
struct CompareRow {
    PointAggregate agg;
    UnionBoundResult ub_d1, ub_d2, ub_d3;
    GaussianConverse conv_gaussian;
    double conv_bernoulli = 0.0;
    double conv_general = 0.0;    // from the Gaussian MAC sum rate
    double exponent_floor = 0.0;  // exp(-E0 m) at this m
    bool bound_violated_d1 = false, bound_violated_d2 = false, bound_violated_d3 = false,
         floor_violated = false; // empirical below the exponent floor beyond 3 SE
};

std::vector<CompareRow> compare_bounds(const SweepConfig& cfg);

/// Write rows in the given format. CSV columns:
///   n,k,m,sigma_sq,delta,metric,param,trials,seed,err_rate,se,
///   omega0_rate,omegaIc_rate,omegaJ_rate,union_bound,vacuous_flag
/// Doubles are serialized with 17 significant digits, so a parse
/// round-trips to the identical values. Throws IoError on failure.
void emit(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path);
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_json(const std::vector<ResultRow>& rows, std::ostream& os);

/// Parse rows back from a CSV file produced by emit().
std::vector<ResultRow> parse_csv(const std::string& path);

nlohmann::json to_json(const CompareRow& row);
nlohmann::json to_json(const UnionBoundResult& ub);

} // namespace ssr
