#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "she/rng.hpp"

using namespace she;

TEST(Rng, PhiloxKnownAnswers) {
    // published known-answer vectors of the reference implementation
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, PureFunctionOfInputs) {
    for (std::uint64_t site : {0ull, 1ull, 17ull, 1ull << 32})
        EXPECT_EQ(rng_stream(7, 3, 11, site), rng_stream(7, 3, 11, site));
    EXPECT_NE(rng_stream(7, 3, 11, 0), rng_stream(8, 3, 11, 0));
    EXPECT_NE(rng_stream(7, 3, 11, 0), rng_stream(7, 4, 11, 0));
    EXPECT_NE(rng_stream(7, 3, 11, 0), rng_stream(7, 3, 12, 0));
    EXPECT_NE(rng_stream(7, 3, 11, 0), rng_stream(7, 3, 11, 1));
    const auto [a, b] = rng_normal_pair(99, 1, 2, 5);
    EXPECT_EQ(rng_stream(99, 1, 2, 10), a);
    EXPECT_EQ(rng_stream(99, 1, 2, 11), b);
    // high seed bits matter
    EXPECT_NE(rng_stream(1, 0, 0, 0), rng_stream(1 + (1ull << 40), 0, 0, 0));
}

TEST(Rng, UniformStaysOpen) {
    EXPECT_GT(uniform_open(0), 0.0);
    EXPECT_LT(uniform_open(~0ull), 1.0);
}

TEST(Rng, MomentsOfAMillionDraws) {
    const std::size_t n = 1000000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng_stream(2024, static_cast<std::uint32_t>(i % 97), static_cast<std::uint32_t>(i / 97), i);
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    const double mean = s1 / n, var = s2 / n - mean * mean;
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(double(n)));
    EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(Rng, ReplicateStreamsUncorrelated) {
    const std::size_t n = 10000;
    for (std::uint32_t r = 0; r < 5; ++r) {
        double sxy = 0, sxx = 0, syy = 0, sx = 0, sy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng_stream(5, r, 0, i), y = rng_stream(5, r + 1, 0, i);
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        const double cov = sxy / n - sx * sy / (n * n);
        const double rho = cov / std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
        EXPECT_LT(std::abs(rho), 0.05) << r;
    }
}

TEST(Rng, PairComponentsUncorrelated) {
    const std::size_t n = 20000;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [a, b] = rng_normal_pair(1, 0, 0, static_cast<std::uint32_t>(i));
        s += a * b;
    }
    EXPECT_LT(std::abs(s / n), 4.0 / std::sqrt(double(n)));
}
