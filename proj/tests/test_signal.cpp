#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssr/errors.hpp"
#include "ssr/signal.hpp"

using namespace ssr;

namespace {

SparseSignal fixed_signal(int n, std::vector<int> support, std::vector<double> values) {
    return SparseSignal::make(n, std::move(support), std::move(values));
}

} // namespace

TEST_CASE("make_signal: full support is forced when k = n") {
    const auto x = make_signal(5, 5, {MagnitudeLaw::Kind::fixed, 1.0, 1.0}, SignLaw::positive, 3);
    CHECK(x.support == std::vector<int>{0, 1, 2, 3, 4});
    for (double v : x.values) CHECK(v == 1.0);
    CHECK(x.energy() == doctest::Approx(5.0));
    CHECK(x.min_magnitude() == doctest::Approx(1.0));
}

TEST_CASE("make_signal: energy and minimum magnitude follow the law") {
    const auto x = make_signal(8, 2, {MagnitudeLaw::Kind::fixed, 2.0, 2.0}, SignLaw::positive, 11);
    CHECK(x.energy() == doctest::Approx(8.0));
    CHECK(x.min_magnitude() == doctest::Approx(2.0));
    CHECK(x.k() == 2);
}

TEST_CASE("make_signal: deterministic in the seed") {
    const auto a = make_signal(30, 4, {MagnitudeLaw::Kind::uniform, 1.0, 2.0}, SignLaw::random_sign, 9);
    const auto b = make_signal(30, 4, {MagnitudeLaw::Kind::uniform, 1.0, 2.0}, SignLaw::random_sign, 9);
    CHECK(a.support == b.support);
    CHECK(a.values == b.values);
}

TEST_CASE("make_signal: support marginals are uniform") {
    const int n = 100, k = 10, draws = 10'000;
    std::vector<int> counts(n, 0);
    for (int d = 0; d < draws; ++d) {
        const auto x = make_signal(n, k, {MagnitudeLaw::Kind::uniform, 1.0, 2.0},
                                   SignLaw::positive, static_cast<std::uint64_t>(d));
        for (int i : x.support) ++counts[i];
    }
    for (int i = 0; i < n; ++i) {
        const double freq = static_cast<double>(counts[i]) / draws;
        CHECK(freq >= 0.09);
        CHECK(freq <= 0.11);
    }
}

TEST_CASE("make_signal: parameter errors") {
    CHECK_THROWS_AS(make_signal(4, 5, {}, SignLaw::positive, 0), ParameterError);
    CHECK_THROWS_AS(make_signal(4, 2, {MagnitudeLaw::Kind::fixed, 0.0, 0.0}, SignLaw::positive, 0),
                    ParameterError);
}

TEST_CASE("observe: single-spike observations separate the noise deterministically") {
    const auto A = sample_matrix({EnsembleKind::gaussian, 21, Normalization::unit_column}, 12, 6);
    const NoiseModel noise{0.25};
    const auto x1 = fixed_signal(6, {3}, {1.5});
    const auto x2 = fixed_signal(6, {3}, {3.0});
    const Vector y1 = observe(A, x1, noise, 5);
    const Vector y2 = observe(A, x2, noise, 5); // same noise realization
    const Vector diff = y2 - y1;                // noise cancels, leaving 1.5 * a_3
    CHECK((diff - 1.5 * A.body.col(3)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(observe(A, x1, noise, 5) == y1); // deterministic in the seed
}

TEST_CASE("observe: residual noise energy concentrates at sigma_sq") {
    const int m = 100'000;
    const auto A = sample_matrix({EnsembleKind::gaussian, 8, Normalization::unit_column}, m, 2);
    const auto x = fixed_signal(2, {0}, {2.0});
    const NoiseModel noise{0.5};
    const Vector y = observe(A, x, noise, 17);
    const Vector z = y - 2.0 * A.body.col(0);
    CHECK(z.squaredNorm() / m == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("observe: dimension mismatch") {
    const auto A = sample_matrix({EnsembleKind::gaussian, 1, Normalization::unit_column}, 5, 4);
    const auto x = fixed_signal(6, {0}, {1.0});
    CHECK_THROWS_AS(observe(A, x, NoiseModel{1.0}, 0), ParameterError);
}

TEST_CASE("metric_d1: exact support match only") {
    const auto x = fixed_signal(6, {1, 4}, {1.0, -2.0});
    CHECK(metric_d1(x, {1, 4}));
    CHECK(metric_d1(x, {4, 1})); // order does not matter
    CHECK_FALSE(metric_d1(x, {1, 3}));
    CHECK_FALSE(metric_d1(x, {1}));
}

TEST_CASE("metric_d2: overlap ratio against 1 - alpha") {
    std::vector<int> support(10), nine(10);
    std::vector<double> values(10, 1.0);
    for (int i = 0; i < 10; ++i) support[i] = i;
    const auto x = fixed_signal(20, support, values);

    for (int i = 0; i < 9; ++i) nine[i] = i;
    nine[9] = 15; // overlap 9 of 10
    CHECK_FALSE(metric_d2(x, nine, 0.05)); // 0.9 not > 0.95
    CHECK(metric_d2(x, nine, 0.2));        // 0.9 > 0.8
    CHECK(metric_d2(x, support, 0.05));    // J = I always succeeds
    CHECK_THROWS_AS(metric_d2(x, nine, 0.0), ParameterError);
    CHECK_THROWS_AS(metric_d2(x, nine, 1.0), ParameterError);
}

TEST_CASE("metric_d3: captured energy against (1 - eps) P") {
    const auto x = fixed_signal(5, {0, 2}, {2.0, 1.0});
    CHECK(metric_d3(x, {0, 2}, 0.1));
    CHECK_FALSE(metric_d3(x, {0, 4}, 0.1)); // 4 not > 4.5
    CHECK(metric_d3(x, {0, 4}, 0.3));       // 4 > 3.5
    CHECK_THROWS_AS(metric_d3(x, {0}, 1.5), ParameterError);
}

TEST_CASE("metrics: d1 success implies d2 and d3 success") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto x = make_signal(12, 3, {MagnitudeLaw::Kind::uniform, 0.5, 2.0},
                                   SignLaw::random_sign, seed);
        CHECK(metric_d1(x, x.support));
        CHECK(metric_d2(x, x.support, 0.01));
        CHECK(metric_d3(x, x.support, 0.01));
    }
}

TEST_CASE("metrics: enlarging the overlap never flips success to failure") {
    const auto x = fixed_signal(10, {0, 1, 2, 3}, {1.0, 1.0, 2.0, 0.5});
    const std::vector<int> small{0, 7, 8, 9};
    const std::vector<int> bigger{0, 1, 8, 9};
    for (double a : {0.3, 0.6, 0.9}) {
        if (metric_d2(x, small, a)) CHECK(metric_d2(x, bigger, a));
    }
    for (double e : {0.2, 0.5, 0.8}) {
        if (metric_d3(x, small, e)) CHECK(metric_d3(x, bigger, e));
    }
}

TEST_CASE("GainProfile: sorted descending, alpha_k is the weakest gain") {
    const auto g = GainProfile::from_values({0.5, 2.0, 1.0});
    CHECK(g.gains == std::vector<double>{2.0, 1.0, 0.5});
    CHECK(g.alpha_k() == 0.5);
    CHECK(g.energy() == doctest::Approx(5.25));
    const auto x = fixed_signal(5, {1, 3}, {-3.0, 1.0});
    CHECK(GainProfile::from_signal(x).gains == std::vector<double>{3.0, 1.0});
}
