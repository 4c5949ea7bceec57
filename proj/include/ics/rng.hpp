#pragma once

#include <cstdint>
#include <random>

namespace ics {

// SplitMix64 step; used to derive independent substream seeds from one
// master seed so that trial k's stream does not depend on how many draws
// earlier trials consumed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for substream `index` of stream `master`. Deterministic and
// order-insensitive: derive_seed(m, k) never depends on other indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t st = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    splitmix64(st);
    return splitmix64(st);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace ics
