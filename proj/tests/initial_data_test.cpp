#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "she/initial_data.hpp"

using namespace she;

TEST(InitialData, LebesgueAndDirac) {
    const auto leb = InitialMeasure::lebesgue();
    const auto dir = InitialMeasure::dirac();
    for (double t : {0.01, 1.0, 30.0})
        for (double x : {-3.0, 0.0, 2.5}) {
            EXPECT_EQ(j0(leb, 1.3, t, x), 1.0);
            EXPECT_DOUBLE_EQ(j0(dir, 1.0, t, x), heat_kernel(1.0, t, x));
        }
    // quadrature path for Lebesgue agrees with the shortcut
    Density d;
    d.name = "one";
    d.f = [](double) { return 1.0; };
    d.tail = TailClass::polynomial(0.0);
    EXPECT_NEAR(density_heat_flow_quadrature(d, 1.0, 0.7, 0.3), 1.0, 1e-9);
}

TEST(InitialData, ExpDecayClosedFormVsQuadrature) {
    const auto mu = InitialMeasure::exp_decay(1.0);
    // frozen 50-digit value of e^{1/2} erfc(1/sqrt2)
    EXPECT_NEAR(j0(mu, 1.0, 1.0, 0.0), 0.52315658373024674336, 1e-14);
    EXPECT_NEAR(j0(mu, 1.0, 1.0, 0.0, J0Path::quadrature), 0.52315658373024674336, 1e-9);
    const double ref = static_cast<double>(oracle::line_at([](long double y) { return oracle::G(1, 1, -y) * std::exp(-std::abs(y)); }, 0.0L));
    EXPECT_NEAR(j0(mu, 1.0, 1.0, 0.0), ref, 1e-14);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(0.01, 5.0), ux(-6.0, 6.0);
    for (int i = 0; i < 50; ++i) {
        const double t = ut(rng), x = ux(rng);
        for (const auto& m : {InitialMeasure::exp_decay(0.25), InitialMeasure::gaussian_bump(0.4, 0.7), InitialMeasure::indicator(-1.0, 0.5)}) {
            const double a = j0(m, 0.8, t, x), b = j0(m, 0.8, t, x, J0Path::quadrature);
            EXPECT_NEAR(a, b, 1e-8 * std::abs(a) + 1e-300) << m.name() << " t=" << t << " x=" << x;
        }
    }
}

TEST(InitialData, ExpGrowthQuadrature) {
    const auto mu = InitialMeasure::exp_growth(1.0, 1.5);
    EXPECT_TRUE(check_j0_finite(mu, 1.0, 100.0, 0.0));
    const double t = 0.8, x = 0.4;
    const double ref = static_cast<double>(oracle::line_at(
        [&](long double y) {
            // combine exponents so the integrand never overflows
            return std::exp(-(x - y) * (x - y) / (2 * t) + std::pow(std::abs(y), 1.5L)) / std::sqrt(2 * oracle::pi() * t);
        },
        0.0L));
    EXPECT_NEAR(j0(mu, 1.0, t, x) / ref, 1.0, 1e-8);
}

TEST(InitialData, Admissibility) {
    // e^{x^2}: 2 a nu t = 2 >= 1
    const auto gauss_growth = InitialMeasure::exp_growth(1.0, 2.0);
    EXPECT_FALSE(check_j0_finite(gauss_growth, 1.0, 1.0, 0.0));
    EXPECT_TRUE(check_j0_finite(gauss_growth, 1.0, 0.4, 0.0));
    EXPECT_THROW(j0(gauss_growth, 1.0, 1.0, 0.0), DivergentJ0);
    EXPECT_FALSE(check_j0_finite(InitialMeasure::exp_growth(0.1, 2.5), 1.0, 0.01, 0.0));
    EXPECT_TRUE(check_j0_finite(InitialMeasure::indicator(-1, 1), 1.0, 1e6, 0.0));
    EXPECT_TRUE(check_j0_finite(InitialMeasure::dirac(2.0), 1.0, 1.0, 0.0));
    EXPECT_THROW(check_j0_finite(InitialMeasure::dirac(), 1.0, 0.0, 0.0), InvalidArgument);
    // J0 at the admissible boundary side is still computed from the tail bound
    const double t = 0.4, x = 0.0;
    const double v = j0(gauss_growth, 1.0, t, x);
    // closed form: int G(t,y) e^{y^2} dy = 1/sqrt(1 - 2 nu t)
    EXPECT_NEAR(v, 1.0 / std::sqrt(1.0 - 2.0 * t), 1e-8);
}

TEST(InitialData, ExpTailRate) {
    EXPECT_EQ(exp_tail_rate(InitialMeasure::dirac()), kInf);
    EXPECT_EQ(exp_tail_rate(InitialMeasure::exp_decay(3.0)), 3.0);
    EXPECT_EQ(exp_tail_rate(InitialMeasure::lebesgue()), 0.0);
    EXPECT_EQ(exp_tail_rate(InitialMeasure::indicator(0, 1)), kInf);
    EXPECT_EQ(exp_tail_rate(InitialMeasure::gaussian_bump(0, 1)), kInf);
    EXPECT_EQ(exp_tail_rate(InitialMeasure::exp_growth(0.5, 0.5)), 0.0);
    EXPECT_EQ(exp_tail_rate(linear_combination(1.0, InitialMeasure::exp_decay(2.0), 1.0, InitialMeasure::exp_decay(0.5))), 0.5);
}

TEST(InitialData, LinearityRandom) {
    const auto m1 = InitialMeasure::exp_decay(0.5);
    const auto m2 = InitialMeasure::from_atoms({{0.3, 2.0}, {-1.0, -0.5}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.05, 3.0), ux(-4.0, 4.0), uc(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double a = uc(rng), b = uc(rng), t = ut(rng), x = ux(rng);
        const auto comb = linear_combination(a, m1, b, m2);
        const double lhs = j0(comb, 1.0, t, x);
        const double rhs = a * j0(m1, 1.0, t, x) + b * j0(m2, 1.0, t, x);
        EXPECT_NEAR(lhs, rhs, 1e-8 * (1.0 + std::abs(rhs)));
    }
}

TEST(InitialData, JordanParts) {
    const auto m = linear_combination(2.0, InitialMeasure::from_atoms({{0.0, 1.0}, {1.0, -3.0}}), -1.0, InitialMeasure::gaussian_bump(0, 1));
    const auto pos = m.positive_part(), neg = m.negative_part(), tv = m.total_variation();
    EXPECT_TRUE(pos.is_nonnegative());
    EXPECT_TRUE(neg.is_nonnegative());
    EXPECT_FALSE(m.is_nonnegative());
    for (double x : {-1.0, 0.2, 1.5}) {
        const double t = 0.3;
        EXPECT_NEAR(j0(m, 1.0, t, x), j0(pos, 1.0, t, x) - j0(neg, 1.0, t, x), 1e-14);
        EXPECT_NEAR(j0(tv, 1.0, t, x), j0(pos, 1.0, t, x) + j0(neg, 1.0, t, x), 1e-14);
    }
}

TEST(InitialData, SignedCustomDensitySplit) {
    Density d;
    d.name = "sine_bump";
    d.f = [](double y) { return std::abs(y) <= 3.0 ? std::sin(y) : 0.0; };
    d.tail = TailClass::compact(-3.0, 3.0);
    d.nonnegative = false;
    const auto mu = InitialMeasure::from_density(d);
    const double t = 0.5, x = 0.7;
    const double ref = static_cast<double>(oracle::finite([&](long double y) { return oracle::G(1, t, x - y) * std::sin(y); }, -3.0L, 3.0L));
    EXPECT_NEAR(j0(mu, 1.0, t, x), ref, 1e-9);
    EXPECT_TRUE(mu.positive_part().is_nonnegative());
}

TEST(InitialData, TailConsistencySpotCheck) {
    Density bad;
    bad.name = "liar";
    bad.f = [](double y) { return std::exp(std::abs(y)); };
    bad.tail = TailClass::polynomial(2.0);
    EXPECT_THROW(InitialMeasure::from_density(bad), InvalidArgument);
    Density leak;
    leak.name = "leaky";
    leak.f = [](double y) { return std::exp(-y * y); };
    leak.tail = TailClass::compact(-1.0, 1.0);
    EXPECT_THROW(InitialMeasure::from_density(leak), InvalidArgument);
}

TEST(InitialData, SemigroupConsistency) {
    const auto mu = InitialMeasure::exp_decay(1.0);
    const double t = 0.4, s = 0.3, nu = 1.0;
    for (double x : {-1.0, 0.0, 0.8}) {
        const double lhs = j0(mu, nu, t + s, x);
        const double rhs = static_cast<double>(oracle::line_at(
            [&](long double y) {
                const long double g = oracle::G(nu, s, x - y);
                if (g == 0 || !std::isfinite(static_cast<double>(y))) return 0.0L;
                return g * static_cast<long double>(j0(mu, nu, t, static_cast<double>(y)));
            },
            static_cast<long double>(x)));
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(InitialData, FiniteAndSmoothRandom) {
    const std::vector<InitialMeasure> ms = {InitialMeasure::dirac(), InitialMeasure::exp_decay(1.0), InitialMeasure::indicator(-1, 1),
                                            InitialMeasure::gaussian_bump(0.5, 0.3), InitialMeasure::lebesgue()};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ut(0.05, 5.0), ux(-5.0, 5.0);
    for (const auto& m : ms)
        for (int i = 0; i < 200; ++i) {
            const double t = ut(rng), x = ux(rng), h = 1e-3;
            const double v = j0(m, 1.0, t, x);
            ASSERT_TRUE(std::isfinite(v));
            const double d2 = (j0(m, 1.0, t, x + h) - 2 * v + j0(m, 1.0, t, x - h)) / (h * h);
            // |d^2/dx^2 (G * mu)| <= |mu|-mass * sup|G''| = 1/(sqrt(2 pi) (nu t)^{3/2}) for these masses <= 2
            EXPECT_LE(std::abs(d2), 2.0 / std::pow(t, 1.5) + 1e-3) << m.name();
        }
}

TEST(InitialData, DistributionalInput) {
    DistributionalInput dp{1, 0.0, 1.0};
    const double t = 0.5, x = 0.3, h = 1e-6;
    // -d/dy G(t, x - y) at y = 0 equals d/dx G(t, x)
    const double fd = (heat_kernel(1.0, t, x + h) - heat_kernel(1.0, t, x - h)) / (2 * h);
    EXPECT_NEAR(j0_distributional(dp, 1.0, t, x), fd, 1e-8);
    EXPECT_DOUBLE_EQ(j0_distributional({0, 0.0, 2.0}, 1.0, t, x), 2.0 * heat_kernel(1.0, t, x));
    EXPECT_THROW(j0_distributional({2, 0.0, 1.0}, 1.0, t, x), InvalidArgument);
}
