#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace psidolab::detail {

// Fixed, versioned generator for every seeded draw in the project
// (splitmix64 stream + Box-Muller); results depend only on the seed.

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// standard normal pair keyed on an integer multi-index; order independent
inline void keyed_gaussian(std::uint64_t seed, const std::vector<int>& key, double& g1,
                           double& g2) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
    for (std::size_t i = 0; i < key.size(); ++i)
        h = splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(key[i]) +
                                                       (1LL << 32)) +
                            0x9e3779b97f4a7c15ULL * (i + 1)));
    const double u1 = std::max(uniform01(splitmix64(h ^ 1)), 1e-300);
    const double u2 = uniform01(splitmix64(h ^ 2));
    const double r = std::sqrt(-2.0 * std::log(u1));
    g1 = r * std::cos(2.0 * std::numbers::pi * u2);
    g2 = r * std::sin(2.0 * std::numbers::pi * u2);
}

}  // namespace psidolab::detail
