// Deterministic randomness helpers. mt19937_64 output is pinned by the
// standard, and the normal transform is written out by hand because
// std::normal_distribution's algorithm is implementation-defined; this way
// the same seed gives the same stream on every platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace glucast {

/// Uniform draw in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via the Box-Muller transform, one draw per call.
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = 1.0 - uniform_unit(rng);  // (0, 1], keeps the log finite
    double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// splitmix64 finalizer; used to derive independent sub-seeds from one seed.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(base ^ mix_seed(a ^ mix_seed(b)));
}

}  // namespace glucast
