#pragma once
// Counter-based deterministic random numbers.  Every draw is a pure
// function of (seed, stream, step, lane), so ensemble members and noise
// modes can be sampled in any order or in parallel with identical output.

#include <cmath>
#include <cstdint>

namespace euler {

inline uint64_t mix64(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t stream, uint64_t step, uint64_t lane) {
    uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
    h = mix64(h ^ stream);
    h = mix64(h ^ step);
    h = mix64(h ^ lane);
    return h;
}

inline double uniform01(uint64_t h) {
    // 53-bit mantissa in (0,1]
    return (double((h >> 11) + 1)) * 0x1.0p-53;
}

inline constexpr double kTwoPiRng = 6.283185307179586476925286766559;

struct NormalPair {
    double z0, z1;
};

// two independent standard normals from one counter (Box-Muller)
inline NormalPair normal_pair(uint64_t seed, uint64_t stream, uint64_t step, uint64_t lane = 0) {
    double u1 = uniform01(counter_hash(seed, stream, step, 2 * lane));
    double u2 = uniform01(counter_hash(seed, stream, step, 2 * lane + 1));
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPiRng * u2), r * std::sin(kTwoPiRng * u2)};
}

}  // namespace euler
