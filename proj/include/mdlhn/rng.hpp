#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace mdlhn {

/// Portable pseudo-random source.
///
/// The bit stream is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The standard distributions are not portable across library
/// implementations, so the derived draws are defined here:
///   - uniform01: top 53 bits of one draw scaled by 2^-53, in [0,1);
///   - index(n): rejection sampling to a multiple of n, then modulo;
///   - normal: Box-Muller, consuming two uniform draws per call (the second
///     variate is discarded so every call advances the stream identically).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::size_t index(std::size_t n) {
        // n > 0 is a caller precondition
        const auto bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
        std::uint64_t x = engine_();
        while (x > limit) x = engine_();
        return static_cast<std::size_t>(x % bound);
    }

    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01();  // (0,1]
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace mdlhn
