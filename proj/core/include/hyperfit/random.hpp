#pragma once

// Portable random variates on top of std::mt19937_64. The standard library
// distributions are implementation-defined; these transforms are not, so a
// seed reproduces the same sample on every platform.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hyperfit {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of Monte Carlo run `index`: the (index+1)-th output of a SplitMix64
/// stream started at `master`. Depends only on (master, index).
constexpr std::uint64_t run_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * index);
}

/// Uniform on the open interval (0, 1), 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Box-Muller, one variate per call.
inline double standard_normal(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// u + v tan(pi (U - 1/2)).
inline double cauchy(std::mt19937_64& rng, double u, double v) {
    return u + v * std::tan(std::numbers::pi * (uniform01(rng) - 0.5));
}

}  // namespace hyperfit
