#include "ssr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "ssr/concentration.hpp"
#include "ssr/errors.hpp"
#include "ssr/rng.hpp"

namespace ssr {

namespace {

constexpr std::uint64_t salt_point = 0x41;
constexpr std::uint64_t salt_signal = 1;
constexpr std::uint64_t salt_matrix = 2;
constexpr std::uint64_t salt_observe = 3;

double binomial_se(double rate, std::int64_t trials) {
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* sign_law_to_string(SignLaw s) {
    return s == SignLaw::positive ? "positive" : "random_sign";
}

const char* decode_mode_to_string(DecodeMode m) {
    return m == DecodeMode::strict ? "strict" : "first_unique";
}

const char* magnitude_kind_to_string(MagnitudeLaw::Kind k) {
    return k == MagnitudeLaw::Kind::fixed ? "fixed" : "uniform";
}

SignLaw sign_law_from_string(const std::string& s) {
    if (s == "positive") return SignLaw::positive;
    if (s == "random_sign") return SignLaw::random_sign;
    throw ParameterError("unknown sign law: " + s);
}

DecodeMode decode_mode_from_string(const std::string& s) {
    if (s == "strict") return DecodeMode::strict;
    if (s == "first_unique") return DecodeMode::first_unique;
    throw ParameterError("unknown decode mode: " + s);
}

MagnitudeLaw::Kind magnitude_kind_from_string(const std::string& s) {
    if (s == "fixed") return MagnitudeLaw::Kind::fixed;
    if (s == "uniform") return MagnitudeLaw::Kind::uniform;
    throw ParameterError("unknown magnitude law: " + s);
}

TrialRecord run_trial(const SweepConfig& cfg, int n, int k, int m, std::int64_t trial,
                      std::uint64_t point_seed) {
    const std::uint64_t trial_seed = rng::derive(point_seed, static_cast<std::uint64_t>(trial));

    const SparseSignal x =
        make_signal(n, k, cfg.magnitude, cfg.signs, rng::derive(trial_seed, salt_signal));
    EnsembleSpec spec{cfg.ensemble, rng::derive(trial_seed, salt_matrix), cfg.normalization};
    const MeasurementMatrix A = sample_matrix(spec, m, n);
    const Vector y = observe(A, x, NoiseModel{cfg.sigma_sq}, rng::derive(trial_seed, salt_observe));

    const TypicalityParams params = cfg.typicality();
    const DecodeOutcome outcome =
        decode_exhaustive(A, y, k, cfg.sigma_sq, params, cfg.mode, cfg.max_subsets);
    const EventFlags events = classify_events(A, y, cfg.sigma_sq, params, outcome, x.support);

    TrialRecord rec;
    rec.trial = trial;
    rec.omega0 = events.omega0;
    rec.omega_I_c = events.omega_I_complement;
    rec.omega_J = events.omega_J_fired;
    rec.overlap = outcome.chosen ? support_overlap(x, *outcome.chosen) : -1;

    if (cfg.mode == DecodeMode::strict) {
        // Correct decoding means the true support is the one and only
        // typical set: the complement of the union event. The three metric
        // bits coincide here.
        const bool ok = !events.any();
        rec.d1 = rec.d2 = rec.d3 = ok;
    } else {
        if (outcome.chosen) {
            rec.d1 = metric_d1(x, *outcome.chosen);
            rec.d2 = metric_d2(x, *outcome.chosen, cfg.alpha);
            rec.d3 = metric_d3(x, *outcome.chosen, cfg.eps_energy);
        }
        // No decision counts as an error under every metric.
    }
    return rec;
}

} // namespace

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ParameterError("unknown output format: " + s);
}

void SweepConfig::validate() const {
    if (n_grid.empty() || k_grid.empty() || m_grid.empty())
        throw ParameterError("config: grids must be nonempty");
    for (int n : n_grid)
        if (n < 1) throw ParameterError("config: n must be positive");
    for (int k : k_grid) {
        if (k < 1) throw ParameterError("config: k must be positive");
        for (int n : n_grid)
            if (k > n) throw ParameterError("config: k must not exceed n");
        for (int m : m_grid)
            if (m < k) throw ParameterError("config: every m must be >= every k");
    }
    for (int m : m_grid)
        if (m < 1) throw ParameterError("config: m must be positive");
    if (sigma_sq <= 0.0) throw ParameterError("config: sigma_sq must be positive");
    if (delta <= 0.0) throw ParameterError("config: delta must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("config: alpha must lie in (0,1)");
    if (!(eps_energy > 0.0 && eps_energy < 1.0))
        throw ParameterError("config: eps_energy must lie in (0,1)");
    if (magnitude.mu0 <= 0.0) throw ParameterError("config: mu0 must be positive");
    if (magnitude.kind == MagnitudeLaw::Kind::uniform && magnitude.mu1 < magnitude.mu0)
        throw ParameterError("config: need mu1 >= mu0");
    if (trials < 1) throw ParameterError("config: trials must be positive");
    if (max_subsets < 1) throw ParameterError("config: max_subsets must be positive");
    if (workers < 1) throw ParameterError("config: workers must be positive");
    if (rank_tol <= 0.0) throw ParameterError("config: rank_tol must be positive");
    if (c0 && *c0 <= 0.0) throw ParameterError("config: c0 must be positive");
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
    SweepConfig cfg;
    try {
        if (j.contains("ensemble")) cfg.ensemble = ensemble_kind_from_string(j.at("ensemble"));
        if (j.contains("normalization"))
            cfg.normalization = normalization_from_string(j.at("normalization"));
        if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
        if (j.contains("k_grid")) cfg.k_grid = j.at("k_grid").get<std::vector<int>>();
        if (j.contains("m_grid")) cfg.m_grid = j.at("m_grid").get<std::vector<int>>();
        cfg.sigma_sq = j.value("sigma_sq", cfg.sigma_sq);
        cfg.delta = j.value("delta", cfg.delta);
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.eps_energy = j.value("eps_energy", cfg.eps_energy);
        if (j.contains("magnitude")) {
            const auto& mj = j.at("magnitude");
            cfg.magnitude.kind = magnitude_kind_from_string(mj.value("kind", "fixed"));
            cfg.magnitude.mu0 = mj.value("mu0", cfg.magnitude.mu0);
            cfg.magnitude.mu1 = mj.value("mu1", cfg.magnitude.mu0);
        }
        if (j.contains("signs")) cfg.signs = sign_law_from_string(j.at("signs"));
        cfg.trials = j.value("trials", cfg.trials);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("mode")) cfg.mode = decode_mode_from_string(j.at("mode"));
        cfg.max_subsets = j.value("max_subsets", cfg.max_subsets);
        cfg.workers = j.value("workers", cfg.workers);
        cfg.rank_tol = j.value("rank_tol", cfg.rank_tol);
        if (j.contains("c0") && !j.at("c0").is_null()) cfg.c0 = j.at("c0").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

nlohmann::json SweepConfig::to_json() const {
    nlohmann::json j{
        {"ensemble", ssr::to_string(ensemble)},
        {"normalization", ssr::to_string(normalization)},
        {"n_grid", n_grid},
        {"k_grid", k_grid},
        {"m_grid", m_grid},
        {"sigma_sq", sigma_sq},
        {"delta", delta},
        {"alpha", alpha},
        {"eps_energy", eps_energy},
        {"magnitude",
         {{"kind", magnitude_kind_to_string(magnitude.kind)}, {"mu0", magnitude.mu0}, {"mu1", magnitude.mu1}}},
        {"signs", sign_law_to_string(signs)},
        {"trials", trials},
        {"seed", seed},
        {"mode", decode_mode_to_string(mode)},
        {"max_subsets", max_subsets},
        {"workers", workers},
        {"rank_tol", rank_tol},
    };
    if (c0) j["c0"] = *c0;
    return j;
}

SweepConfig SweepConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError("config: invalid JSON in " + path + ": " + e.what());
    }
    return from_json(j);
}

double PointAggregate::err(Metric::Kind kind) const {
    switch (kind) {
        case Metric::Kind::d1: return err_d1;
        case Metric::Kind::d2: return err_d2;
        case Metric::Kind::d3: return err_d3;
    }
    return 0.0;
}

double PointAggregate::se(Metric::Kind kind) const {
    switch (kind) {
        case Metric::Kind::d1: return se_d1;
        case Metric::Kind::d2: return se_d2;
        case Metric::Kind::d3: return se_d3;
    }
    return 0.0;
}

PointResult run_point(const SweepConfig& cfg, int n, int k, int m) {
    if (k < 1 || k > n || m < k)
        throw ParameterError("run_point: need 1 <= k <= n and m >= k");
    if (subset_count(n, k) > cfg.max_subsets)
        throw BudgetError("run_point: C(n,k) exceeds max_subsets");

    // Point substream keyed by the point's identity, not its grid position:
    // adding grid points never perturbs existing results.
    const std::uint64_t point_seed =
        rng::derive(cfg.seed, {salt_point, static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(m)});

    std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (std::int64_t t = 0; t < cfg.trials; ++t)
            records[static_cast<std::size_t>(t)] = run_trial(cfg, n, k, m, t, point_seed);
    } else {
        std::atomic<std::int64_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto work = [&] {
            for (;;) {
                const std::int64_t t = next.fetch_add(1);
                if (t >= cfg.trials) return;
                try {
                    records[static_cast<std::size_t>(t)] = run_trial(cfg, n, k, m, t, point_seed);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    PointResult result;
    auto& agg = result.agg;
    agg.n = n;
    agg.k = k;
    agg.m = m;
    agg.sigma_sq = cfg.sigma_sq;
    agg.delta = cfg.delta;
    agg.trials = cfg.trials;
    agg.seed = cfg.seed;

    std::int64_t ok1 = 0, ok2 = 0, ok3 = 0, e0 = 0, eIc = 0, eJ = 0;
    for (const auto& r : records) {
        ok1 += r.d1;
        ok2 += r.d2;
        ok3 += r.d3;
        e0 += r.omega0;
        eIc += r.omega_I_c;
        eJ += r.omega_J;
    }
    const double t = static_cast<double>(cfg.trials);
    agg.err_d1 = 1.0 - ok1 / t;
    agg.err_d2 = 1.0 - ok2 / t;
    agg.err_d3 = 1.0 - ok3 / t;
    agg.se_d1 = binomial_se(agg.err_d1, cfg.trials);
    agg.se_d2 = binomial_se(agg.err_d2, cfg.trials);
    agg.se_d3 = binomial_se(agg.err_d3, cfg.trials);
    agg.omega0_rate = e0 / t;
    agg.omegaIc_rate = eIc / t;
    agg.omegaJ_rate = eJ / t;
    result.records = std::move(records);
    return result;
}

namespace {

// Signal parameters the closed forms are evaluated at. For the uniform
// magnitude law the guaranteed minimum mu0 is used, which keeps every
// residual-energy floor a valid lower bound for every realized signal.
struct LawPoint {
    double mu;
    double energy(int k) const { return k * mu * mu; }
};

LawPoint law_point(const SweepConfig& cfg) {
    return {cfg.magnitude.mu0};
}

std::vector<ResultRow> rows_for_point(const SweepConfig& cfg, const PointAggregate& agg) {
    const LawPoint lp = law_point(cfg);
    AchievabilityInputs in{agg.n, agg.k, agg.m, cfg.sigma_sq, cfg.delta,
                           lp.mu, lp.energy(agg.k), cfg.c0};

    std::vector<ResultRow> rows;
    for (const Metric& metric :
         {Metric::d1(), Metric::d2(cfg.alpha), Metric::d3(cfg.eps_energy)}) {
        ResultRow row;
        row.n = agg.n;
        row.k = agg.k;
        row.m = agg.m;
        row.sigma_sq = agg.sigma_sq;
        row.delta = agg.delta;
        row.metric = metric.name();
        row.param = metric.param;
        row.trials = agg.trials;
        row.seed = agg.seed;
        row.err_rate = agg.err(metric.kind);
        row.se = agg.se(metric.kind);
        row.omega0_rate = agg.omega0_rate;
        row.omegaIc_rate = agg.omegaIc_rate;
        row.omegaJ_rate = agg.omegaJ_rate;
        if (agg.n > agg.k && agg.m > agg.k) {
            const UnionBoundResult ub = union_bound(in, metric);
            row.union_bound = ub.total;
            row.vacuous_flag = ub.vacuous_as_probability();
        } else {
            row.union_bound = std::numeric_limits<double>::quiet_NaN();
            row.vacuous_flag = true;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult result;
    for (int n : cfg.n_grid) {
        for (int k : cfg.k_grid) {
            for (int m : cfg.m_grid) {
                try {
                    const PointResult point = run_point(cfg, n, k, m);
                    auto rows = rows_for_point(cfg, point.agg);
                    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
                } catch (const BudgetError& e) {
                    std::ostringstream os;
                    os << "n=" << n << " k=" << k << " m=" << m << ": " << e.what();
                    result.skipped.push_back(os.str());
                }
            }
        }
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.n, a.k, a.m, a.metric) < std::tie(b.n, b.k, b.m, b.metric);
    });
    return result;
}

std::vector<CompareRow> compare_bounds(const SweepConfig& cfg) {
    cfg.validate();
    const LawPoint lp = law_point(cfg);

    std::vector<CompareRow> rows;
    for (int n : cfg.n_grid) {
        for (int k : cfg.k_grid) {
            for (int m : cfg.m_grid) {
                PointResult point;
                try {
                    point = run_point(cfg, n, k, m);
                } catch (const BudgetError&) {
                    continue;
                }
                CompareRow row;
                row.agg = point.agg;
                AchievabilityInputs in{n, k, m, cfg.sigma_sq, cfg.delta,
                                       lp.mu, lp.energy(k), cfg.c0};
                row.ub_d1 = union_bound(in, Metric::d1());
                row.ub_d2 = union_bound(in, Metric::d2(cfg.alpha));
                row.ub_d3 = union_bound(in, Metric::d3(cfg.eps_energy));
                if (k < n) {
                    const GainProfile gains = GainProfile::uniform(k, lp.mu);
                    row.conv_gaussian = converse_gaussian({n, k, gains, cfg.sigma_sq});
                    row.conv_bernoulli = converse_bernoulli(n, k);
                    row.conv_general =
                        converse_general(n, k, cmac_sumrate_gaussian(gains, cfg.sigma_sq));
                }
                row.exponent_floor = error_exponent_floor(m, lp.mu, cfg.sigma_sq);

                const auto violated_above = [&](Metric::Kind kind, const UnionBoundResult& ub) {
                    return point.agg.err(kind) > ub.total + 3.0 * point.agg.se(kind);
                };
                row.bound_violated_d1 = violated_above(Metric::Kind::d1, row.ub_d1);
                row.bound_violated_d2 = violated_above(Metric::Kind::d2, row.ub_d2);
                row.bound_violated_d3 = violated_above(Metric::Kind::d3, row.ub_d3);
                // The exponent floor lower-bounds the exact-recovery error.
                row.floor_violated =
                    point.agg.err_d1 < row.exponent_floor - 3.0 * point.agg.se_d1;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "n,k,m,sigma_sq,delta,metric,param,trials,seed,err_rate,se,"
          "omega0_rate,omegaIc_rate,omegaJ_rate,union_bound,vacuous_flag\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.k << ',' << r.m << ',' << format_double(r.sigma_sq) << ','
           << format_double(r.delta) << ',' << r.metric << ',' << format_double(r.param) << ','
           << r.trials << ',' << r.seed << ',' << format_double(r.err_rate) << ','
           << format_double(r.se) << ',' << format_double(r.omega0_rate) << ','
           << format_double(r.omegaIc_rate) << ',' << format_double(r.omegaJ_rate) << ','
           << format_double(r.union_bound) << ',' << (r.vacuous_flag ? 1 : 0) << '\n';
    }
}

namespace {

nlohmann::json row_to_json(const ResultRow& r) {
    return nlohmann::json{
        {"n", r.n},
        {"k", r.k},
        {"m", r.m},
        {"sigma_sq", r.sigma_sq},
        {"delta", r.delta},
        {"metric", r.metric},
        {"param", r.param},
        {"trials", r.trials},
        {"seed", r.seed},
        {"err_rate", r.err_rate},
        {"se", r.se},
        {"omega0_rate", r.omega0_rate},
        {"omegaIc_rate", r.omegaIc_rate},
        {"omegaJ_rate", r.omegaJ_rate},
        {"union_bound", r.union_bound},
        {"vacuous_flag", r.vacuous_flag},
    };
}

} // namespace

void emit_json(const std::vector<ResultRow>& rows, std::ostream& os) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) j.push_back(row_to_json(r));
    os << j.dump(2) << '\n';
}

void emit(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open output file: " + path);
    if (format == OutputFormat::csv)
        emit_csv(rows, out);
    else
        emit_json(rows, out);
    out.flush();
    if (!out)
        throw IoError("write failed: " + path);
}

std::vector<ResultRow> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty CSV file: " + path);

    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 16)
            throw IoError("malformed CSV row in " + path);
        ResultRow r;
        r.n = std::stoi(fields[0]);
        r.k = std::stoi(fields[1]);
        r.m = std::stoi(fields[2]);
        r.sigma_sq = std::stod(fields[3]);
        r.delta = std::stod(fields[4]);
        r.metric = fields[5];
        r.param = std::stod(fields[6]);
        r.trials = std::stoll(fields[7]);
        r.seed = std::stoull(fields[8]);
        r.err_rate = std::stod(fields[9]);
        r.se = std::stod(fields[10]);
        r.omega0_rate = std::stod(fields[11]);
        r.omegaIc_rate = std::stod(fields[12]);
        r.omegaJ_rate = std::stod(fields[13]);
        r.union_bound = std::stod(fields[14]);
        r.vacuous_flag = fields[15] == "1";
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json to_json(const UnionBoundResult& ub) {
    nlohmann::json j{
        {"atypical_term", ub.atypical_term},
        {"wrong_set_term", ub.wrong_set_term},
        {"log_wrong_set_term", ub.log_wrong_set_term},
        {"total", ub.total},
        {"any_vacuous", ub.any_vacuous},
        {"vacuous_classes", ub.vacuous_classes},
        {"vacuous_as_probability", ub.vacuous_as_probability()},
    };
    if (ub.rank_term)
        j["rank_term"] = *ub.rank_term;
    else
        j["rank_term"] = "unquantified: supply c0 or see the empirical rank-failure sweep";
    return j;
}

nlohmann::json to_json(const CompareRow& row) {
    const auto& a = row.agg;
    return nlohmann::json{
        {"n", a.n},
        {"k", a.k},
        {"m", a.m},
        {"sigma_sq", a.sigma_sq},
        {"delta", a.delta},
        {"trials", a.trials},
        {"seed", a.seed},
        {"empirical",
         {{"err_d1", a.err_d1},
          {"err_d2", a.err_d2},
          {"err_d3", a.err_d3},
          {"se_d1", a.se_d1},
          {"se_d2", a.se_d2},
          {"se_d3", a.se_d3},
          {"omega0_rate", a.omega0_rate},
          {"omegaIc_rate", a.omegaIc_rate},
          {"omegaJ_rate", a.omegaJ_rate}}},
        {"union_bound", {{"d1", to_json(row.ub_d1)}, {"d2", to_json(row.ub_d2)}, {"d3", to_json(row.ub_d3)}}},
        {"converse",
         {{"gaussian_two_term_max", row.conv_gaussian.two_term_max},
          {"gaussian_term_single_user", row.conv_gaussian.term_single_user},
          {"gaussian_term_sum_rate", row.conv_gaussian.term_sum_rate},
          {"gaussian_refined_single_user", row.conv_gaussian.refined_single_user},
          {"gaussian_low_snr", row.conv_gaussian.low_snr},
          {"gaussian_low_snr_valid", row.conv_gaussian.low_snr_valid},
          {"bernoulli", row.conv_bernoulli},
          {"general_gaussian_cmac", row.conv_general}}},
        {"exponent_floor", row.exponent_floor},
        {"cutoff_rate_form", cutoff_rate_form},
        {"flags",
         {{"bound_violated_d1", row.bound_violated_d1},
          {"bound_violated_d2", row.bound_violated_d2},
          {"bound_violated_d3", row.bound_violated_d3},
          {"floor_violated", row.floor_violated},
          {"vacuous_d1", row.ub_d1.vacuous_as_probability()},
          {"vacuous_d2", row.ub_d2.vacuous_as_probability()},
          {"vacuous_d3", row.ub_d3.vacuous_as_probability()}}},
    };
}

} // namespace ssr
