#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ssr::rng {

// splitmix64 finalizer: full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Derive the seed of an independent child stream from (seed, salt).
/// Used to give every grid point / trial / draw phase its own substream,
/// so results do not depend on evaluation order or worker count.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed + 0x9E3779B97F4A7C15ull * (salt + 0x632BE59BD9B4E019ull));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = seed;
    for (std::uint64_t p : path) s = derive(s, p);
    return s;
}

/// Small counter-based PRNG (splitmix64). One instance per Monte Carlo
/// trial; never shared between threads. Identical seeds reproduce the
/// identical draw sequence on every platform.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    /// Standard normal via Marsaglia's polar method (second value cached).
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// ±1 with probability 1/2 each.
    double next_sign() {
        return (next_u64() & 1ull) ? 1.0 : -1.0;
    }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ssr::rng
