#pragma once

#include <cmath>
#include <cstdint>

namespace qclab {

// Deterministic xoshiro256++ generator seeded through splitmix64.
// The core is integer-only, so a given seed yields the same stream on
// every platform and compiler; all floating-point draws are derived
// from fixed bit patterns of that stream.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t s[4] = {1, 2, 3, 4};

    static RngState from_seed(std::uint64_t seed) {
        RngState r;
        r.seed = seed;
        std::uint64_t x = seed;
        for (auto& w : r.s)
            w = splitmix64(x);
        return r;
    }

    // Independent stream i of a base seed (stream = base + i).
    static RngState derive(std::uint64_t base_seed, std::uint64_t i) {
        return from_seed(base_seed + i);
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t v = next_u64();
            if (v >= threshold)
                return v % n;
        }
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
};

}  // namespace qclab
