#include <gtest/gtest.h>

#include <cmath>

#include "she/quadrature.hpp"
#include "she/special_functions.hpp"

using namespace she;

TEST(Quadrature, SmoothFinite) {
    const auto r = integrate([](double x) { return std::sin(x); }, 0.0, kPi);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-13);
    const auto rev = integrate([](double x) { return x * x; }, 1.0, 0.0);
    EXPECT_NEAR(rev.value, -1.0 / 3.0, 1e-14);
}

TEST(Quadrature, BreakpointsAtKinks) {
    const auto r = integrate_breaks([](double x) { return std::abs(x - 0.3); }, {-1.0, 0.3, 1.0});
    EXPECT_NEAR(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-14);
}

TEST(Quadrature, WholeLineGaussian) {
    const auto r = integrate_line([](double x) { return heat_kernel(0.3, 0.2, x - 5.0); }, {5.0}, 0.25);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    const auto m2 = integrate_line([](double x) { return x * x * heat_kernel(1.0, 2.0, x); }, {0.0}, 1.0);
    EXPECT_NEAR(m2.value, 2.0, 1e-11);
}

TEST(Quadrature, SqrtEndpointSingularities) {
    const auto r = integrate_sqrt_ends([](double s) { return 1.0 / std::sqrt(s * (1.0 - s)); }, 0.0, 1.0, true, true);
    EXPECT_NEAR(r.value, kPi, 1e-12);
    const auto l = integrate_sqrt_ends([](double s) { return 1.0 / std::sqrt(s); }, 0.0, 4.0, true, false, {1.0});
    EXPECT_NEAR(l.value, 4.0, 1e-12);
    const auto rr = integrate_sqrt_ends([](double s) { return 1.0 / std::sqrt(2.0 - s); }, 1.0, 2.0, false, true);
    EXPECT_NEAR(rr.value, 2.0, 1e-12);
}

TEST(Quadrature, DyadicTowardZero) {
    const auto conv = integrate_toward_zero([](double s) { return 1.0 / std::sqrt(s); }, 1.0);
    EXPECT_FALSE(conv.divergent);
    EXPECT_NEAR(conv.value, 2.0, 1e-8);
    const auto div = integrate_toward_zero([](double s) { return std::pow(s, -1.5); }, 1.0);
    EXPECT_TRUE(div.divergent);
    const auto logdiv = integrate_toward_zero([](double s) { return 1.0 / s; }, 1.0);
    EXPECT_TRUE(logdiv.divergent);
}

TEST(Quadrature, NonFiniteIntegrandIsReported) {
    const auto r = integrate([](double) { return std::numeric_limits<double>::infinity(); }, 0.0, 1.0);
    EXPECT_FALSE(r.converged);
    EXPECT_FALSE(std::isfinite(r.value));
}
