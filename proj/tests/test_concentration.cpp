#include <doctest.h>

#include <cmath>

#include "ssr/concentration.hpp"
#include "ssr/errors.hpp"
#include "oracles.hpp"

using namespace ssr;

namespace {

SparseSignal unit_signal(int n, int k) {
    std::vector<int> support(k);
    for (int i = 0; i < k; ++i) support[i] = i;
    return SparseSignal::make(n, support, std::vector<double>(k, 1.0));
}

} // namespace

TEST_CASE("sample_V: true-support residual behaves like a centered chi-square") {
    const int m = 100, k = 10;
    const auto x = unit_signal(20, k);
    const auto vs = sample_V({EnsembleKind::gaussian, 0, Normalization::raw}, x, x.support, 1.0,
                             m, 100'000, 51);
    REQUIRE(vs.samples.size() == 100'000);
    CHECK(vs.gamma1 == m - k);
    CHECK(vs.gamma2 == 2.0);
    CHECK(vs.meta.sigma_y_sq == 1.0); // J = I leaves only the noise
    CHECK(vs.meta.overlap == k);

    double mean = 0.0;
    for (double v : vs.samples) mean += v;
    mean /= vs.samples.size();
    double var = 0.0;
    for (double v : vs.samples) var += (v - mean) * (v - mean);
    var /= (vs.samples.size() - 1);

    // V + (m-k) is chi-square with m-k degrees of freedom.
    CHECK(std::abs(mean) <= 3.0 * std::sqrt(2.0 * (m - k) / 1e5));
    CHECK(var == doctest::Approx(2.0 * (m - k)).epsilon(0.05));
}

TEST_CASE("sample_V: disjoint candidate set is centered as well") {
    const auto x = SparseSignal::make(4, {0}, {1.0});
    const auto vs = sample_V({EnsembleKind::gaussian, 1, Normalization::raw}, x, {2}, 1.0,
                             60, 100'000, 52);
    CHECK(vs.meta.sigma_y_sq == 2.0); // 1^2 + sigma_sq
    CHECK(vs.meta.overlap == 0);
    double mean = 0.0;
    for (double v : vs.samples) mean += v;
    mean /= vs.samples.size();
    CHECK(std::abs(mean) <= 3.0 * std::sqrt(2.0 * vs.gamma1 / 1e5));
}

TEST_CASE("sample_V: square full-rank system has zero residual") {
    const auto x = unit_signal(4, 2);
    const auto vs = sample_V({EnsembleKind::gaussian, 2, Normalization::raw}, x, x.support, 1.0,
                             2, 1000, 53);
    CHECK(vs.gamma1 == 0.0);
    for (double v : vs.samples) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("sample_V: rank-deficient draws are excluded and counted") {
    const auto x = unit_signal(4, 2);
    const auto vs = sample_V({EnsembleKind::rademacher, 3, Normalization::raw}, x, x.support, 1.0,
                             2, 10'000, 54);
    // half of all 2x2 sign matrices are singular
    CHECK(vs.meta.rank_deficient_excluded ==
          doctest::Approx(5000.0).epsilon(0.1));
    CHECK(vs.samples.size() + vs.meta.rank_deficient_excluded == 10'000);
}

TEST_CASE("sample_V: parameter errors") {
    const auto x = unit_signal(6, 2);
    CHECK_THROWS_AS(sample_V({}, x, {0}, 1.0, 10, 1000, 0), ParameterError);     // |J| != k
    CHECK_THROWS_AS(sample_V({}, x, {0, 1}, 1.0, 1, 1000, 0), ParameterError);   // m < k
    CHECK_THROWS_AS(sample_V({}, x, {0, 1}, 1.0, 10, 10, 0), ParameterError);    // trials
    CHECK_THROWS_AS(sample_V({}, x, {0, 9}, 1.0, 10, 1000, 0), ParameterError);  // range
}

TEST_CASE("check_tail_bounds: threshold formulas and gaussian true-support case") {
    const auto x = unit_signal(20, 10);
    const auto vs = sample_V({EnsembleKind::gaussian, 4, Normalization::raw}, x, x.support, 1.0,
                             100, 100'000, 55);
    const auto report = check_tail_bounds(vs, {0.5, 1.0, 2.0});
    REQUIRE(report.rows.size() == 3);

    const auto& r1 = report.rows[1]; // lambda = 1, gamma1 = 90
    CHECK(r1.upper_threshold == doctest::Approx(15.416407864998739).epsilon(1e-12));
    CHECK(r1.lower_threshold == doctest::Approx(-std::sqrt(180.0)).epsilon(1e-12));
    CHECK(r1.bound == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(report.violations == 0);
    for (const auto& row : report.rows) CHECK(row.sufficient);
}

TEST_CASE("check_tail_bounds: tiny lambda is vacuous, huge lambda unresolvable") {
    const auto x = unit_signal(20, 10);
    const auto vs = sample_V({EnsembleKind::gaussian, 5, Normalization::raw}, x, x.support, 1.0,
                             50, 10'000, 56);
    const auto report = check_tail_bounds(vs, {1e-9, 30.0});
    CHECK_FALSE(report.rows[0].upper_violation); // bound ~ 1 can never be violated
    CHECK_FALSE(report.rows[1].sufficient);      // e^-30 needs far more than 10^4 samples
    CHECK(report.violations == 0);
    CHECK_THROWS_AS(check_tail_bounds(vs, {}), ParameterError);
}

TEST_CASE("check_moment_condition: frozen bound values and gaussian case") {
    const auto x = unit_signal(20, 10);
    const auto vs = sample_V({EnsembleKind::gaussian, 6, Normalization::raw}, x, x.support, 1.0,
                             100, 100'000, 57);
    const auto report = check_moment_condition(vs, {-0.2, 0.0, 0.1}, 50, 58);
    REQUIRE(report.rows.size() == 3);

    // bound at t=0.1, gamma1=90: -9 - 45 ln(0.8)
    CHECK(report.rows[2].bound == doctest::Approx(1.041459809139436).epsilon(1e-12));
    // t = 0: both sides identically zero
    CHECK(report.rows[1].empirical_log_mgf == 0.0);
    CHECK(report.rows[1].bound == 0.0);
    CHECK_FALSE(report.rows[1].violation);
    // quadratic bound applies for negative t only
    CHECK(report.rows[0].quad_bound == doctest::Approx(90.0 * 0.04).epsilon(1e-12));
    CHECK(std::isnan(report.rows[2].quad_bound));
    CHECK(report.violations == 0);

    // For the gaussian true-support case the statistic is exactly the
    // centered chi-square, whose log-MGF is the bound itself.
    const double oracle = oracles::chi_square_log_mgf(90.0, -0.2);
    CHECK(report.rows[0].empirical_log_mgf ==
          doctest::Approx(oracle).epsilon(0.02)); // Monte Carlo tolerance
    CHECK(report.rows[0].empirical_log_mgf <= 3.6 + 3.0 * report.rows[0].se_bootstrap);
}

TEST_CASE("check_moment_condition: t outside the admissible interval") {
    const auto x = unit_signal(20, 10);
    const auto vs = sample_V({EnsembleKind::gaussian, 7, Normalization::raw}, x, x.support, 1.0,
                             30, 10'000, 59);
    CHECK_THROWS_AS(check_moment_condition(vs, {0.5}), ParameterError);
    CHECK_THROWS_AS(check_moment_condition(vs, {-0.5}), ParameterError);
    CHECK_THROWS_AS(check_moment_condition(vs, {}), ParameterError);
}

TEST_CASE("chernoff rate identity: numeric supremum equals lambda on the grid") {
    for (double g1 : {0.5, 7.0, 90.0}) {
        for (double g2 : {0.5, 2.0, 5.0}) {
            for (double lam : {0.3, 1.0, 4.0}) {
                const auto row = check_rate_identity(g1, g2, lam);
                CHECK(std::abs(row.rate_numeric - lam) <= 1e-8);
                CHECK(std::abs(row.rate_at_tstar - lam) <= 1e-8);
                CHECK(row.tstar > 0.0);
                CHECK(row.tstar < 1.0 / g2);
                // quadratic lower envelope of the rate function
                CHECK(row.rate_numeric >=
                      row.eps * row.eps / (2.0 * g2 * row.eps + 2.0 * g1) - 1e-10);
            }
        }
    }
}
