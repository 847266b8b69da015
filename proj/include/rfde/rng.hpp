#pragma once

#include <cstdint>
#include <random>

namespace rfde {

/// SplitMix64 step, used to derive well-separated per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for (seed, stream). Every Monte Carlo instance draws from its own
/// stream, so sweeps are reproducible regardless of how work is scheduled.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (0x517cc1b727220a95ULL * (stream + 1))));
}

}  // namespace rfde
