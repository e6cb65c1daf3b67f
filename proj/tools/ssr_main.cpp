// ssr — command-line driver for the sparse support recovery toolkit.
//
// Subcommands:
//   simulate             Monte Carlo error rates at one (n,k,m) point,
//                        emitted next to the closed-form bounds
//   sweep                Monte Carlo error rates over a (n,k,m) grid -> CSV/JSON
//   bounds               closed-form achievability and converse values only
//   verify-concentration empirical residual-statistic tail/moment checks
//   version              print the tool version
//
// Exit codes: 0 success, 2 parameter error, 3 budget error, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssr/bounds.hpp"
#include "ssr/concentration.hpp"
#include "ssr/errors.hpp"
#include "ssr/harness.hpp"
#include "ssr/rng.hpp"

namespace {

constexpr const char* version_string = "ssr 0.1.0";

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "csv";
    std::optional<int> workers;
    std::optional<std::string> ensemble;
    std::optional<std::string> normalization;
    std::optional<std::int64_t> trials;
    std::optional<double> sigma_sq, delta, alpha, eps_energy, mu0, mu1, c0;
    std::optional<std::string> mode;
    std::optional<std::int64_t> max_subsets;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (single source of truth)");
    cmd->add_option("--seed", f.seed, "master seed (overrides config)");
    cmd->add_option("--out", f.out_path, "output path");
    cmd->add_option("--format", f.format, "output format: csv|json")->capture_default_str();
    cmd->add_option("--workers", f.workers, "worker threads");
    cmd->add_option("--ensemble", f.ensemble, "gaussian|rademacher|uniform_pm");
    cmd->add_option("--normalization", f.normalization, "unit_column|root_m_column|raw");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per point");
    cmd->add_option("--sigma-sq", f.sigma_sq, "noise variance per coordinate");
    cmd->add_option("--delta", f.delta, "typicality slack");
    cmd->add_option("--alpha", f.alpha, "metric d2 parameter");
    cmd->add_option("--eps-energy", f.eps_energy, "metric d3 parameter");
    cmd->add_option("--mu0", f.mu0, "signal magnitude (or lower endpoint)");
    cmd->add_option("--mu1", f.mu1, "upper magnitude endpoint (uniform law)");
    cmd->add_option("--mode", f.mode, "strict|first_unique");
    cmd->add_option("--max-subsets", f.max_subsets, "enumeration budget guard");
    cmd->add_option("--c0", f.c0, "rank-failure exponent for the union bound");
}

ssr::SweepConfig build_config(const CommonFlags& f) {
    ssr::SweepConfig cfg;
    if (!f.config_path.empty()) cfg = ssr::SweepConfig::load(f.config_path);
    if (f.seed) cfg.seed = *f.seed;
    if (f.workers) cfg.workers = *f.workers;
    if (f.ensemble) cfg.ensemble = ssr::ensemble_kind_from_string(*f.ensemble);
    if (f.normalization) cfg.normalization = ssr::normalization_from_string(*f.normalization);
    if (f.trials) cfg.trials = *f.trials;
    if (f.sigma_sq) cfg.sigma_sq = *f.sigma_sq;
    if (f.delta) cfg.delta = *f.delta;
    if (f.alpha) cfg.alpha = *f.alpha;
    if (f.eps_energy) cfg.eps_energy = *f.eps_energy;
    if (f.mu0) {
        cfg.magnitude.mu0 = *f.mu0;
        if (cfg.magnitude.kind == ssr::MagnitudeLaw::Kind::fixed) cfg.magnitude.mu1 = *f.mu0;
    }
    if (f.mu1) {
        cfg.magnitude.mu1 = *f.mu1;
        cfg.magnitude.kind = ssr::MagnitudeLaw::Kind::uniform;
    }
    if (f.mode)
        cfg.mode = (*f.mode == "strict") ? ssr::DecodeMode::strict
                                         : (*f.mode == "first_unique")
                                               ? ssr::DecodeMode::first_unique
                                               : throw ssr::ParameterError("unknown mode: " + *f.mode);
    if (f.max_subsets) cfg.max_subsets = *f.max_subsets;
    if (f.c0) cfg.c0 = *f.c0;
    return cfg;
}

void write_or_print(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ssr::IoError("cannot open output file: " + out_path);
    out << j.dump(2) << '\n';
    if (!out) throw ssr::IoError("write failed: " + out_path);
}

int cmd_simulate(const CommonFlags& f, std::optional<int> n, std::optional<int> k,
                 std::optional<int> m) {
    ssr::SweepConfig cfg = build_config(f);
    if (n) cfg.n_grid = {*n};
    if (k) cfg.k_grid = {*k};
    if (m) cfg.m_grid = {*m};
    if (cfg.n_grid.size() != 1 || cfg.k_grid.size() != 1 || cfg.m_grid.size() != 1)
        throw ssr::ParameterError("simulate: exactly one (n,k,m) point required");
    cfg.validate();

    const auto rows = ssr::compare_bounds(cfg);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : rows) j.push_back(ssr::to_json(row));
    write_or_print(j.size() == 1 ? j.front() : j, f.out_path);
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    ssr::SweepConfig cfg = build_config(f);
    cfg.validate();
    if (f.out_path.empty())
        throw ssr::ParameterError("sweep: --out is required");

    const ssr::SweepResult result = ssr::run_sweep(cfg);
    for (const auto& s : result.skipped)
        std::cerr << "skipped " << s << '\n';
    ssr::emit(result.rows, ssr::output_format_from_string(f.format), f.out_path);
    std::cerr << "wrote " << result.rows.size() << " rows to " << f.out_path << '\n';
    return 0;
}

int cmd_bounds(const CommonFlags& f, std::optional<int> n, std::optional<int> k,
               std::optional<int> m) {
    ssr::SweepConfig cfg = build_config(f);
    if (n) cfg.n_grid = {*n};
    if (k) cfg.k_grid = {*k};
    if (m) cfg.m_grid = {*m};
    cfg.validate();

    nlohmann::json out = nlohmann::json::array();
    for (int nn : cfg.n_grid) {
        for (int kk : cfg.k_grid) {
            for (int mm : cfg.m_grid) {
                const double mu = cfg.magnitude.mu0;
                nlohmann::json rec{
                    {"inputs",
                     {{"n", nn},
                      {"k", kk},
                      {"m", mm},
                      {"sigma_sq", cfg.sigma_sq},
                      {"delta", cfg.delta},
                      {"mu", mu},
                      {"signal_energy", kk * mu * mu},
                      {"alpha", cfg.alpha},
                      {"eps_energy", cfg.eps_energy},
                      {"c0", cfg.c0 ? nlohmann::json(*cfg.c0) : nlohmann::json(nullptr)}}},
                    {"cutoff_rate_form", ssr::cutoff_rate_form},
                };
                if (mm > kk) {
                    ssr::AchievabilityInputs in{nn, kk, mm, cfg.sigma_sq, cfg.delta,
                                                mu, kk * mu * mu, cfg.c0};
                    rec["atypical_bound"] = ssr::prob_atypical_bound(mm, kk, cfg.sigma_sq, cfg.delta);
                    rec["union_bound"] = {
                        {"d1", ssr::to_json(ssr::union_bound(in, ssr::Metric::d1()))},
                        {"d2", ssr::to_json(ssr::union_bound(in, ssr::Metric::d2(cfg.alpha)))},
                        {"d3", ssr::to_json(ssr::union_bound(in, ssr::Metric::d3(cfg.eps_energy)))},
                    };
                }
                if (kk < nn) {
                    const ssr::GainProfile gains = ssr::GainProfile::uniform(kk, mu);
                    const auto gc = ssr::converse_gaussian({nn, kk, gains, cfg.sigma_sq});
                    const double sum_rate = ssr::cmac_sumrate_gaussian(gains, cfg.sigma_sq);
                    rec["converse"] = {
                        {"gaussian_two_term_max", gc.two_term_max},
                        {"gaussian_term_single_user", gc.term_single_user},
                        {"gaussian_term_sum_rate", gc.term_sum_rate},
                        {"gaussian_refined_single_user", gc.refined_single_user},
                        {"gaussian_low_snr", gc.low_snr},
                        {"gaussian_low_snr_valid", gc.low_snr_valid},
                        {"bernoulli", ssr::converse_bernoulli(nn, kk)},
                        {"cmac_sumrate_gaussian_nats", sum_rate},
                        {"general_from_gaussian_cmac", ssr::converse_general(nn, kk, sum_rate)},
                    };
                }
                rec["exponent_floor"] = ssr::error_exponent_floor(mm, mu, cfg.sigma_sq);
                out.push_back(std::move(rec));
            }
        }
    }
    write_or_print(out.size() == 1 ? out.front() : out, f.out_path);
    return 0;
}

int cmd_verify_concentration(const CommonFlags& f, int m, int k) {
    ssr::SweepConfig cfg = build_config(f);
    const std::int64_t trials = f.trials.value_or(100'000);
    const double sigma_sq = f.sigma_sq.value_or(1.0);
    const std::uint64_t seed = f.seed.value_or(0);
    const double mu = f.mu0.value_or(1.0);
    const std::vector<double> lambda_grid{0.5, 1.0, 2.0};
    const std::vector<double> t_grid{-0.4, -0.2, -0.05, 0.05, 0.2, 0.4};

    // The tail and moment claims apply in the unit-entry-variance regime.
    const ssr::Normalization norm =
        f.normalization ? ssr::normalization_from_string(*f.normalization) : ssr::Normalization::raw;

    nlohmann::json report;
    report["params"] = {{"m", m},       {"k", k},           {"sigma_sq", sigma_sq},
                        {"trials", trials}, {"seed", seed}, {"mu", mu},
                        {"lambda_grid", lambda_grid}, {"t_grid", t_grid},
                        {"normalization", ssr::to_string(norm)}};

    int total_violations = 0;
    nlohmann::json sets = nlohmann::json::array();
    std::vector<int> support(k);
    for (int i = 0; i < k; ++i) support[i] = i;
    const ssr::SparseSignal x =
        ssr::SparseSignal::make(2 * k, support, std::vector<double>(k, mu));

    for (ssr::EnsembleKind kind :
         {ssr::EnsembleKind::gaussian, ssr::EnsembleKind::rademacher, ssr::EnsembleKind::uniform_pm}) {
        for (int overlap : {0, k / 2}) {
            // J shares `overlap` indices with I, the rest disjoint.
            std::vector<int> J;
            for (int i = 0; i < overlap; ++i) J.push_back(i);
            for (int i = 0; i < k - overlap; ++i) J.push_back(k + i);

            ssr::EnsembleSpec spec{kind, ssr::rng::derive(seed, static_cast<std::uint64_t>(overlap)),
                                   norm};
            const ssr::VSampleSet vs = ssr::sample_V(spec, x, J, sigma_sq, m, trials, spec.seed);
            const auto tails = ssr::check_tail_bounds(vs, lambda_grid);
            const auto moments = ssr::check_moment_condition(vs, t_grid);
            total_violations += tails.violations + moments.violations;

            nlohmann::json tj = nlohmann::json::array();
            for (const auto& r : tails.rows)
                tj.push_back({{"lambda", r.lambda},
                              {"upper_threshold", r.upper_threshold},
                              {"lower_threshold", r.lower_threshold},
                              {"upper_freq", r.upper_freq},
                              {"lower_freq", r.lower_freq},
                              {"bound", r.bound},
                              {"upper_violation", r.upper_violation},
                              {"lower_violation", r.lower_violation},
                              {"sufficient", r.sufficient}});
            nlohmann::json mj = nlohmann::json::array();
            for (const auto& r : moments.rows)
                mj.push_back({{"t", r.t},
                              {"empirical_log_mgf", r.empirical_log_mgf},
                              {"bound", r.bound},
                              {"quad_bound", r.t < 0 ? nlohmann::json(r.quad_bound) : nlohmann::json(nullptr)},
                              {"se_bootstrap", r.se_bootstrap},
                              {"violation", r.violation},
                              {"quad_violation", r.quad_violation}});
            sets.push_back({{"ensemble", ssr::to_string(kind)},
                            {"overlap", vs.meta.overlap},
                            {"gamma1", vs.gamma1},
                            {"gamma2", vs.gamma2},
                            {"sigma_y_sq", vs.meta.sigma_y_sq},
                            {"samples", vs.samples.size()},
                            {"rank_deficient_excluded", vs.meta.rank_deficient_excluded},
                            {"tail_bounds", tj},
                            {"moment_condition", mj}});
        }
    }
    report["sample_sets"] = sets;

    // Deterministic verification of the Chernoff-rate identity and its
    // closed-form maximizer on a 27-point grid.
    nlohmann::json alg = nlohmann::json::array();
    for (double g1 : {0.5, 7.0, 90.0}) {
        for (double g2 : {0.5, 2.0, 5.0}) {
            for (double lam : {0.3, 1.0, 4.0}) {
                const auto row = ssr::check_rate_identity(g1, g2, lam);
                alg.push_back({{"gamma1", row.gamma1},
                               {"gamma2", row.gamma2},
                               {"lambda", row.lambda},
                               {"eps", row.eps},
                               {"rate_numeric", row.rate_numeric},
                               {"rate_at_tstar", row.rate_at_tstar},
                               {"tstar", row.tstar},
                               {"identity_error", std::abs(row.rate_numeric - row.lambda)},
                               {"maximizer_error", std::abs(row.rate_at_tstar - row.lambda)}});
            }
        }
    }
    report["rate_identity"] = alg;
    report["total_violations"] = total_violations;

    write_or_print(report, f.out_path);
    std::cerr << "violations: " << total_violations << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse support recovery: simulation, bounds, and concentration checks"};
    app.require_subcommand(1);

    CommonFlags sim_flags, sweep_flags, bounds_flags, conc_flags;
    std::optional<int> sim_n, sim_k, sim_m, bounds_n, bounds_k, bounds_m;
    int conc_m = 100, conc_k = 10;

    auto* sim = app.add_subcommand("simulate", "Monte Carlo error rates at one grid point");
    add_common_flags(sim, sim_flags);
    sim->add_option("--n", sim_n, "signal dimension");
    sim->add_option("--k", sim_k, "sparsity");
    sim->add_option("--m", sim_m, "measurements");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo error rates over the config grid");
    add_common_flags(sweep, sweep_flags);

    auto* bounds = app.add_subcommand("bounds", "closed-form bounds only (no simulation)");
    add_common_flags(bounds, bounds_flags);
    bounds->add_option("--n", bounds_n, "signal dimension");
    bounds->add_option("--k", bounds_k, "sparsity");
    bounds->add_option("--m", bounds_m, "measurements");

    auto* conc = app.add_subcommand("verify-concentration",
                                    "empirical tail/moment checks of the residual statistic");
    add_common_flags(conc, conc_flags);
    conc->add_option("--m", conc_m, "measurements")->capture_default_str();
    conc->add_option("--k", conc_k, "sparsity")->capture_default_str();

    auto* ver = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_flags, sim_n, sim_k, sim_m);
        if (sweep->parsed()) return cmd_sweep(sweep_flags);
        if (bounds->parsed()) return cmd_bounds(bounds_flags, bounds_n, bounds_k, bounds_m);
        if (conc->parsed()) return cmd_verify_concentration(conc_flags, conc_m, conc_k);
        if (ver->parsed()) {
            std::cout << version_string << '\n';
            return 0;
        }
    } catch (const ssr::BudgetError& e) {
        std::cerr << "budget error: " << e.what() << '\n';
        return 3;
    } catch (const ssr::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 4;
    } catch (const ssr::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
