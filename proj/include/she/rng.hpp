#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include "she/special_functions.hpp"

namespace she {

// Philox4x32-10 (Salmon et al., Random123): a keyed bijection on 128-bit counters.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

// Uniform on the 2^52 midpoints (k + 1/2) 2^-52, all exactly representable, so never 0 or 1.
inline double uniform_open(std::uint64_t bits) { return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52; }

// Two independent standard normals for sites (2*pair, 2*pair+1) at (seed, replicate, step).
// Counter layout {pair, step, replicate, 0}, key {seed low, seed high}; Box-Muller on two 64-bit words.
inline std::pair<double, double> rng_normal_pair(std::uint64_t seed, std::uint32_t replicate, std::uint32_t step, std::uint32_t pair) {
    const PhiloxCounter out = philox4x32_10({pair, step, replicate, 0u}, {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    const double r = std::sqrt(-2.0 * std::log(uniform_open(a)));
    const double th = 2.0 * kPi * uniform_open(b);
    return {r * std::cos(th), r * std::sin(th)};
}

// Standard normal as a pure function of (seed, replicate, step, site).
inline double rng_stream(std::uint64_t seed, std::uint32_t replicate, std::uint32_t step, std::uint64_t site) {
    const auto [z0, z1] = rng_normal_pair(seed, replicate, step, static_cast<std::uint32_t>(site >> 1));
    return (site & 1u) ? z1 : z0;
}

}  // namespace she
