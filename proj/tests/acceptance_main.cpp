// Acceptance suite: every criterion prints one [PASS]/[FAIL] line with the
// measured values; the process exits nonzero if any criterion fails.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ssr/bounds.hpp"
#include "ssr/concentration.hpp"
#include "ssr/decoder.hpp"
#include "ssr/ensembles.hpp"
#include "ssr/harness.hpp"
#include "ssr/linalg.hpp"
#include "ssr/rng.hpp"
#include "ssr/signal.hpp"
#include "oracles.hpp"

using namespace ssr;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    int id;
    std::string name;
    std::function<Outcome()> fn;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

SparseSignal unit_signal(int n, int k) {
    std::vector<int> support(k);
    for (int i = 0; i < k; ++i) support[i] = i;
    return SparseSignal::make(n, support, std::vector<double>(k, 1.0));
}

// ---------------------------------------------------------------------------
// 1. Formula golden values.
Outcome criterion_formulas() {
    Outcome out;
    std::ostringstream os;

    // Independent recomputation of the atypicality bound on a different
    // arithmetic route (long double, regrouped).
    const long double exponent = (0.2L * 0.2L * 100.0L * 100.0L) /
                                 (4.0L * ((100.0L - 10.0L) + (2.0L * 0.2L) * 100.0L));
    const double recomputed = static_cast<double>(2.0L * std::exp(-exponent));
    const double atypical = prob_atypical_bound(100, 10, 1.0, 0.2);
    const bool ok1 = std::abs(atypical - recomputed) <= 1e-4;

    const double bernoulli = converse_bernoulli(1024, 16);
    const bool ok2 = std::abs(bernoulli - 31.50) <= 0.01;

    const auto gauss = converse_gaussian({1024, 16, GainProfile::uniform(16, 1.0), 1.0});
    const bool ok3 = gauss.term_single_user == 12.0;
    const bool ok4 = std::abs(gauss.refined_single_user - std::log2(1009.0)) <= 1e-9;

    out.pass = ok1 && ok2 && ok3 && ok4;
    os << "atypical=" << fmt(atypical) << " (recomputed " << fmt(recomputed) << ")"
       << ", bernoulli=" << fmt(bernoulli) << ", first_term=" << fmt(gauss.term_single_user)
       << ", refined=" << fmt(gauss.refined_single_user);
    out.detail = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// 2. Union bound equals the explicit wrong-set enumeration oracle.
Outcome criterion_union_oracle() {
    Outcome out;
    double worst = 0.0;
    const std::vector<std::pair<int, int>> grid{{10, 2}, {15, 3}, {12, 4},
                                                {20, 4}, {25, 3}, {10, 5}};
    for (const auto& [n, k] : grid) {
        AchievabilityInputs in{n, k, 3 * k + 6, 1.0, 0.05, 1.0,
                               static_cast<double>(k), std::nullopt};
        for (const Metric& metric : {Metric::d1(), Metric::d2(0.3), Metric::d3(0.25)}) {
            const double expected = oracles::union_bound_enumerated(in, metric);
            const double got = union_bound(in, metric).total;
            const double rel = std::abs(got - expected) / expected;
            worst = std::max(worst, rel);
            if (rel > 1e-12) out.pass = false;
        }
    }
    out.detail = "worst relative deviation " + fmt(worst) + " over " +
                 std::to_string(grid.size()) + " (n,k) pairs x 3 metrics";
    return out;
}

// ---------------------------------------------------------------------------
// Shared helper for criteria 3 and 4: empirical atypicality rate of the true
// support under a given ensemble.
double atypicality_rate(EnsembleKind kind, std::uint64_t seed, std::int64_t trials) {
    const int m = 100, k = 10;
    const double sigma_sq = 1.0;
    const TypicalityParams params{0.2, default_rank_tol};
    const SparseSignal x = unit_signal(k, k);
    std::vector<int> I(k);
    for (int i = 0; i < k; ++i) I[i] = i;

    std::atomic<std::int64_t> next{0}, atypical{0};
    auto work = [&] {
        for (;;) {
            const std::int64_t t = next.fetch_add(1);
            if (t >= trials) return;
            const std::uint64_t ts = rng::derive(seed, static_cast<std::uint64_t>(t));
            const auto A = sample_matrix({kind, rng::derive(ts, 1), Normalization::unit_column}, m, k);
            const Vector y = observe(A, x, NoiseModel{sigma_sq}, rng::derive(ts, 2));
            if (is_typical(A, I, y, sigma_sq, params) != Typicality::typical)
                atypical.fetch_add(1);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < 4; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return static_cast<double>(atypical.load()) / static_cast<double>(trials);
}

// 3. Typicality concentration for the Gaussian ensemble.
Outcome criterion_typicality_gaussian() {
    const std::int64_t trials = 100'000;
    const double bound = prob_atypical_bound(100, 10, 1.0, 0.2);
    const double rate = atypicality_rate(EnsembleKind::gaussian, 301, trials);
    const double se = std::sqrt(rate * (1.0 - rate) / trials);
    Outcome out;
    out.pass = rate <= bound + 3.0 * se;
    out.detail = "empirical Pr(atypical)=" + fmt(rate) + " <= bound " + fmt(bound) + " + 3SE";
    return out;
}

// 4. The same bound holds for the other subgaussian ensembles, and the
// residual-statistic tail bounds hold at every overlap.
Outcome criterion_subgaussian_extension() {
    Outcome out;
    std::ostringstream os;
    const std::int64_t trials = 100'000;
    const double bound = prob_atypical_bound(100, 10, 1.0, 0.2);

    for (EnsembleKind kind : {EnsembleKind::rademacher, EnsembleKind::uniform_pm}) {
        const double rate = atypicality_rate(kind, 401 + static_cast<int>(kind), trials);
        const double se = std::sqrt(rate * (1.0 - rate) / trials);
        if (rate > bound + 3.0 * se) out.pass = false;
        os << to_string(kind) << " Pr(atypical)=" << fmt(rate) << "; ";
    }

    // Tail bounds at overlaps 0 and k/2 for all three ensembles, run
    // concurrently (each sample set is an independent pure computation).
    const int m = 100, k = 10;
    const SparseSignal x = unit_signal(2 * k, k);
    struct Job {
        EnsembleKind kind;
        int overlap;
    };
    std::vector<Job> jobs;
    for (EnsembleKind kind :
         {EnsembleKind::gaussian, EnsembleKind::rademacher, EnsembleKind::uniform_pm})
        for (int p : {0, k / 2}) jobs.push_back({kind, p});

    std::vector<std::future<TailBoundReport>> futures;
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
        const Job job = jobs[idx];
        const std::uint64_t set_seed = rng::derive(440, idx);
        futures.push_back(std::async(std::launch::async, [&x, job, set_seed, m, k, trials] {
            std::vector<int> J;
            for (int i = 0; i < job.overlap; ++i) J.push_back(i);
            for (int i = 0; i < k - job.overlap; ++i) J.push_back(k + i);
            const EnsembleSpec spec{job.kind, set_seed, Normalization::raw};
            const auto vs = sample_V(spec, x, J, 1.0, m, trials, spec.seed);
            return check_tail_bounds(vs, {0.5, 1.0, 2.0});
        }));
    }
    int violations = 0;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const auto report = futures[i].get();
        violations += report.violations;
        for (const auto& row : report.rows)
            if (!row.sufficient) out.pass = false;
    }
    if (violations != 0) out.pass = false;
    os << "tail violations=" << violations << " over " << jobs.size() << " sample sets";
    out.detail = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// 5. Chernoff-rate identity and closed-form maximizer, deterministically.
Outcome criterion_rate_identity() {
    Outcome out;
    double worst = 0.0;
    for (double g1 : {0.5, 7.0, 90.0}) {
        for (double g2 : {0.5, 2.0, 5.0}) {
            for (double lam : {0.3, 1.0, 4.0}) {
                const auto row = check_rate_identity(g1, g2, lam);
                worst = std::max({worst, std::abs(row.rate_numeric - lam),
                                  std::abs(row.rate_at_tstar - lam)});
            }
        }
    }
    out.pass = worst <= 1e-8;
    out.detail = "worst |rate - lambda| = " + fmt(worst) + " on the 27-point grid";
    return out;
}

// ---------------------------------------------------------------------------
// 6. Decoder end to end at the pinned operating point.
Outcome criterion_decoder_end_to_end() {
    Outcome out;
    std::ostringstream os;

    SweepConfig cfg;
    cfg.ensemble = EnsembleKind::gaussian;
    cfg.normalization = Normalization::unit_column;
    cfg.n_grid = {12};
    cfg.k_grid = {2};
    cfg.m_grid = {24};
    cfg.sigma_sq = 0.01;
    cfg.delta = 0.005;
    cfg.magnitude = {MagnitudeLaw::Kind::fixed, 1.0, 1.0};
    cfg.trials = 500;
    cfg.seed = 601;
    cfg.mode = DecodeMode::strict;
    cfg.workers = 4;

    const auto point = run_point(cfg, 12, 2, 24);
    const bool rate_ok = point.agg.err_d1 <= 0.02;
    os << "d1 error=" << fmt(point.agg.err_d1) << " (threshold 0.02"
       << ", omegaIc=" << fmt(point.agg.omegaIc_rate) << ")";
    if (!rate_ok) {
        os << " -- the true-support residual is an exact chi-square statistic here: "
              "Pr(|Q-22| >= delta*m/sigma_sq = 12) = 0.0628 for Q ~ chi2_22, so the "
              "2% target is unattainable at these parameters";
    }

    // Spot-check decode_exhaustive against the dense-projection oracle on
    // every subset of 20 fresh trials.
    const TypicalityParams params = cfg.typicality();
    bool oracle_ok = true;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto A = sample_matrix(
            {EnsembleKind::gaussian, rng::derive(602, t), Normalization::unit_column}, 24, 12);
        const auto x = make_signal(12, 2, cfg.magnitude, cfg.signs, rng::derive(603, t));
        const Vector y = observe(A, x, NoiseModel{cfg.sigma_sq}, rng::derive(604, t));
        const auto outcome = decode_exhaustive(A, y, 2, cfg.sigma_sq, params, DecodeMode::strict);

        std::vector<std::vector<int>> oracle_typical;
        for (const auto& J : oracles::all_subsets(12, 2)) {
            Matrix sub(24, 2);
            for (int c = 0; c < 2; ++c) sub.col(c) = A.body.col(J[c]);
            if (oracles::row_reduction_rank(sub, params.rank_tol) < 2) continue;
            const double stat = oracles::dense_projection_residual(sub, y) / 24.0 -
                                (22.0 / 24.0) * cfg.sigma_sq;
            if (std::abs(stat) < params.delta) oracle_typical.push_back(J);
        }
        if (oracle_typical != outcome.typical_sets) oracle_ok = false;
    }
    os << "; oracle agreement on 20 trials: " << (oracle_ok ? "yes" : "NO");

    out.pass = rate_ok && oracle_ok;
    out.detail = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// 7. Empirical error between the union bound and the exponent floor.
Outcome criterion_bound_sandwich() {
    SweepConfig cfg;
    cfg.ensemble = EnsembleKind::gaussian;
    cfg.normalization = Normalization::unit_column;
    cfg.n_grid = {20};
    cfg.k_grid = {2};
    cfg.m_grid = {60};
    cfg.sigma_sq = 1.0;
    cfg.delta = 0.1;
    cfg.magnitude = {MagnitudeLaw::Kind::fixed, 1.0, 1.0};
    cfg.trials = 2000;
    cfg.seed = 701;
    cfg.mode = DecodeMode::strict;
    cfg.workers = 4;

    const auto rows = compare_bounds(cfg);
    const auto& row = rows.at(0);
    const double err = row.agg.err_d1;
    const double se = row.agg.se_d1;
    const bool upper_ok = err <= row.ub_d1.total + 3.0 * se;
    const bool lower_ok = err >= row.exponent_floor - 3.0 * se;

    Outcome out;
    out.pass = upper_ok && lower_ok;
    out.detail = "err=" + fmt(err) + " <= union " + fmt(row.ub_d1.total) +
                 (row.ub_d1.vacuous_as_probability() ? " (vacuous)" : "") + " and >= floor " +
                 fmt(row.exponent_floor);
    return out;
}

// ---------------------------------------------------------------------------
// 8. Rank-failure decay for sign matrices.
Outcome criterion_rank_decay() {
    Outcome out;
    std::ostringstream os;

    const std::int64_t trials = 10'000;
    const auto report = smallest_singular_sweep({EnsembleKind::rademacher, 801, Normalization::raw},
                                                10, {10, 12, 15, 20}, trials);
    os << "freq:";
    for (const auto& p : report.points) os << " m=" << p.m << ":" << fmt(p.rank_deficient_freq);

    for (std::size_t i = 1; i < report.points.size(); ++i) {
        const double prev = report.points[i - 1].rank_deficient_freq;
        const double cur = report.points[i].rank_deficient_freq;
        const double se = std::sqrt(std::max(prev, cur) * (1.0 - std::min(prev, cur)) / trials);
        if (cur > prev + 3.0 * se) out.pass = false;
    }
    if (report.points.back().rank_deficient_freq != 0.0) out.pass = false;

    // Exhaustive 2x2 sign-matrix census through the library's rank routine.
    int singular = 0;
    for (int bits = 0; bits < 16; ++bits) {
        Matrix A(2, 2);
        A(0, 0) = (bits & 1) ? 1.0 : -1.0;
        A(1, 0) = (bits & 2) ? 1.0 : -1.0;
        A(0, 1) = (bits & 4) ? 1.0 : -1.0;
        A(1, 1) = (bits & 8) ? 1.0 : -1.0;
        if (numerical_rank(A, default_rank_tol) < 2) ++singular;
    }
    if (singular != 8) out.pass = false;
    os << "; exhaustive 2x2 singular fraction = " << singular << "/16";
    out.detail = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// 9. Determinism across worker counts, and lossless CSV round trip.
Outcome criterion_determinism() {
    SweepConfig cfg;
    cfg.ensemble = EnsembleKind::gaussian;
    cfg.normalization = Normalization::unit_column;
    cfg.n_grid = {10, 12};
    cfg.k_grid = {2};
    cfg.m_grid = {8, 12};
    cfg.sigma_sq = 0.25;
    cfg.delta = 0.1;
    cfg.magnitude = {MagnitudeLaw::Kind::fixed, 1.0, 1.0};
    cfg.trials = 200;
    cfg.seed = 7;
    cfg.mode = DecodeMode::strict;

    cfg.workers = 1;
    const auto serial = run_sweep(cfg);
    cfg.workers = 4;
    const auto parallel = run_sweep(cfg);

    std::ostringstream csv1, csv4, json1, json4;
    emit_csv(serial.rows, csv1);
    emit_csv(parallel.rows, csv4);
    emit_json(serial.rows, json1);
    emit_json(parallel.rows, json4);
    const bool identical = csv1.str() == csv4.str() && json1.str() == json4.str();

    const std::string path = "acceptance_roundtrip.csv";
    emit(serial.rows, OutputFormat::csv, path);
    const auto parsed = parse_csv(path);
    std::ostringstream re;
    emit_csv(parsed, re);
    const bool lossless = re.str() == csv1.str();
    std::remove(path.c_str());

    Outcome out;
    out.pass = identical && lossless;
    out.detail = std::string("workers 1 vs 4 files identical: ") + (identical ? "yes" : "NO") +
                 "; CSV round trip lossless: " + (lossless ? "yes" : "NO");
    return out;
}

} // namespace

int main() {
    const std::vector<Check> checks{
        {1, "formula golden values", criterion_formulas},
        {2, "union-bound oracle equivalence", criterion_union_oracle},
        {3, "typicality concentration (gaussian)", criterion_typicality_gaussian},
        {4, "subgaussian extension + tail bounds", criterion_subgaussian_extension},
        {5, "chernoff rate identity", criterion_rate_identity},
        {6, "decoder end-to-end", criterion_decoder_end_to_end},
        {7, "bound sandwich consistency", criterion_bound_sandwich},
        {8, "rank-failure decay", criterion_rank_decay},
        {9, "determinism and parallel safety", criterion_determinism},
    };

    int failures = 0;
    for (const auto& check : checks) {
        Outcome outcome;
        try {
            outcome = check.fn();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        if (!outcome.pass) ++failures;
        std::printf("[%s] criterion %d: %s -- %s\n", outcome.pass ? "PASS" : "FAIL", check.id,
                    check.name.c_str(), outcome.detail.c_str());
        std::fflush(stdout);
    }
    if (failures > 0)
        std::printf("%d of %zu criteria failed\n", failures, checks.size());
    else
        std::printf("all %zu criteria passed\n", checks.size());
    return failures == 0 ? 0 : 1;
}
