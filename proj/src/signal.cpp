#include "ssr/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssr/errors.hpp"
#include "ssr/rng.hpp"

namespace ssr {

namespace {

constexpr std::uint64_t salt_support = 0x21;
constexpr std::uint64_t salt_magnitude = 0x22;
constexpr std::uint64_t salt_sign = 0x23;
constexpr std::uint64_t salt_noise = 0x24;

void check_candidate_set(const SparseSignal& x, const std::vector<int>& J) {
    for (int j : J)
        if (j < 0 || j >= x.n)
            throw ParameterError("candidate set index out of range");
}

} // namespace

double SparseSignal::energy() const {
    double p = 0.0;
    for (double v : values) p += v * v;
    return p;
}

double SparseSignal::min_magnitude() const {
    double mu = std::abs(values.front());
    for (double v : values) mu = std::min(mu, std::abs(v));
    return mu;
}

Vector SparseSignal::dense() const {
    Vector x = Vector::Zero(n);
    for (std::size_t i = 0; i < support.size(); ++i) x(support[i]) = values[i];
    return x;
}

SparseSignal SparseSignal::make(int n, std::vector<int> support, std::vector<double> values) {
    if (n < 1)
        throw ParameterError("SparseSignal: n must be positive");
    if (support.empty() || support.size() != values.size())
        throw ParameterError("SparseSignal: support and values must be nonempty and aligned");
    if (support.size() > static_cast<std::size_t>(n))
        throw ParameterError("SparseSignal: k must not exceed n");
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0 || support[i] >= n)
            throw ParameterError("SparseSignal: support index out of range");
        if (i > 0 && support[i] <= support[i - 1])
            throw ParameterError("SparseSignal: support must be strictly increasing");
        if (values[i] == 0.0 || !std::isfinite(values[i]))
            throw ParameterError("SparseSignal: values must be nonzero and finite");
    }
    return SparseSignal{n, std::move(support), std::move(values)};
}

double GainProfile::energy() const {
    double e = 0.0;
    for (double g : gains) e += g * g;
    return e;
}

GainProfile GainProfile::from_values(std::vector<double> magnitudes) {
    if (magnitudes.empty())
        throw ParameterError("GainProfile: empty gains");
    for (double& g : magnitudes) {
        g = std::abs(g);
        if (g <= 0.0 || !std::isfinite(g))
            throw ParameterError("GainProfile: gains must be nonzero and finite");
    }
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
    return GainProfile{std::move(magnitudes)};
}

GainProfile GainProfile::from_signal(const SparseSignal& x) {
    return from_values(x.values);
}

GainProfile GainProfile::uniform(int k, double value) {
    if (k < 1)
        throw ParameterError("GainProfile: k must be positive");
    return from_values(std::vector<double>(static_cast<std::size_t>(k), value));
}

SparseSignal make_signal(int n, int k, const MagnitudeLaw& law, SignLaw signs,
                         std::uint64_t seed) {
    if (n < 1 || k < 1 || k > n)
        throw ParameterError("make_signal: need 1 <= k <= n");
    if (law.mu0 <= 0.0)
        throw ParameterError("make_signal: mu0 must be positive");
    if (law.kind == MagnitudeLaw::Kind::uniform && law.mu1 < law.mu0)
        throw ParameterError("make_signal: need mu1 >= mu0");

    // Uniform size-k subset via partial Fisher-Yates.
    rng::Stream support_stream(rng::derive(seed, salt_support));
    std::vector<int> indices(static_cast<std::size_t>(n));
    std::iota(indices.begin(), indices.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(support_stream.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(indices[i], indices[j]);
    }
    std::vector<int> support(indices.begin(), indices.begin() + k);
    std::sort(support.begin(), support.end());

    rng::Stream magnitude_stream(rng::derive(seed, salt_magnitude));
    rng::Stream sign_stream(rng::derive(seed, salt_sign));
    std::vector<double> values(static_cast<std::size_t>(k));
    for (auto& v : values) {
        const double mag = law.kind == MagnitudeLaw::Kind::fixed
                               ? law.mu0
                               : magnitude_stream.next_uniform(law.mu0, law.mu1);
        const double sign = signs == SignLaw::positive ? 1.0 : sign_stream.next_sign();
        v = sign * mag;
    }
    return SparseSignal::make(n, std::move(support), std::move(values));
}

Vector observe(const MeasurementMatrix& A, const SparseSignal& x,
               const NoiseModel& noise, std::uint64_t seed) {
    if (A.cols() != x.n)
        throw ParameterError("observe: matrix column count must equal signal dimension");
    if (noise.sigma_sq <= 0.0)
        throw ParameterError("observe: sigma_sq must be positive");

    Vector y = Vector::Zero(A.rows());
    for (std::size_t i = 0; i < x.support.size(); ++i)
        y += x.values[i] * A.body.col(x.support[i]);

    const double sigma = std::sqrt(noise.sigma_sq);
    rng::Stream noise_stream(rng::derive(seed, salt_noise));
    for (Eigen::Index i = 0; i < y.size(); ++i)
        y(i) += sigma * noise_stream.next_normal();
    return y;
}

int support_overlap(const SparseSignal& x, const std::vector<int>& J) {
    check_candidate_set(x, J);
    int overlap = 0;
    for (int j : J)
        if (std::binary_search(x.support.begin(), x.support.end(), j)) ++overlap;
    return overlap;
}

bool metric_d1(const SparseSignal& x, const std::vector<int>& J) {
    check_candidate_set(x, J);
    if (J.size() != x.support.size()) return false;
    std::vector<int> sorted = J;
    std::sort(sorted.begin(), sorted.end());
    return sorted == x.support;
}

bool metric_d2(const SparseSignal& x, const std::vector<int>& J, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("metric_d2: alpha must lie in (0,1)");
    const double ratio = static_cast<double>(support_overlap(x, J)) / static_cast<double>(x.k());
    return ratio > 1.0 - alpha;
}

bool metric_d3(const SparseSignal& x, const std::vector<int>& J, double eps_energy) {
    if (!(eps_energy > 0.0 && eps_energy < 1.0))
        throw ParameterError("metric_d3: eps_energy must lie in (0,1)");
    check_candidate_set(x, J);
    double captured = 0.0;
    for (std::size_t i = 0; i < x.support.size(); ++i)
        if (std::find(J.begin(), J.end(), x.support[i]) != J.end())
            captured += x.values[i] * x.values[i];
    return captured > (1.0 - eps_energy) * x.energy();
}

} // namespace ssr
