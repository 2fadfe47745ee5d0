#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "she/moment_kernels.hpp"
#include "she/quadrature.hpp"

using namespace she;

TEST(MomentKernels, KValues) {
    const KernelParams kp(1.0, 1.0);
    // frozen from a 50-digit evaluation of the defining product
    EXPECT_NEAR(kernel_K(1.0, 0.0, kp), 0.43453030592364549319, 1e-15);
    EXPECT_NEAR(kernel_K(1.0, 0.0, kp), static_cast<double>(oracle::K(1, 0, 1, 1)), 1e-15);
    EXPECT_LT(kernel_K(1.0, 0.3, KernelParams(1.0, 1e-8)), 1e-15);
    EXPECT_LT(kernel_K(1.0, 50.0, kp), 1e-300);
    EXPECT_THROW(kernel_K(0.0, 0.0, kp), InvalidArgument);
    EXPECT_THROW(kernel_K(-1.0, 0.0, kp), InvalidArgument);
}

TEST(MomentKernels, AlternativeFormRandom) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ut(0.01, 4.0), ux(-3.0, 3.0), ul(0.2, 2.0), un(0.3, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double t = ut(rng), x = ux(rng);
        const KernelParams kp(un(rng), ul(rng));
        const double l2 = kp.lambda * kp.lambda;
        const double alt = heat_kernel(kp.nu / 2, t, x) *
                           (l2 / std::sqrt(4 * kPi * kp.nu * t) + l2 * l2 / (4 * kp.nu) * (kernel_H(t, kp) + 1.0));
        const double k = kernel_K(t, x, kp);
        EXPECT_NEAR(k, alt, 1e-12 * std::max(1.0, k));
        EXPECT_NEAR(k / static_cast<double>(oracle::K(t, x, kp.nu, kp.lambda)), 1.0, 1e-13);
    }
}

TEST(MomentKernels, HValues) {
    const KernelParams kp(1.0, 1.0);
    EXPECT_EQ(kernel_H(0.0, kp), 0.0);
    EXPECT_NEAR(kernel_H(1.0, kp), 0.95236048918255709328, 1e-15);
    EXPECT_THROW(kernel_H(-0.1, kp), InvalidArgument);
    // small-t accuracy: no cancellation
    const double t = 1e-10;
    EXPECT_NEAR(kernel_H(t, kp) / static_cast<double>(oracle::H(t, 1, 1)), 1.0, 1e-9);
}

TEST(MomentKernels, HEqualsOneStarK) {
    // (1 * K)(t,x): space-time integral of K by the oracle quadrature
    const double t = 0.5;
    for (double lam : {0.5, 1.0, 2.0}) {
        const long double v = oracle::finite(
            [&](long double s) {
                if (s <= 0 || s >= t) return 0.0L;
                // y = x - sqrt(t-s) u keeps the bump at unit width as s -> t
                const long double r = std::sqrt(t - s);
                return r * oracle::line_at([&](long double u) { return oracle::K(t - s, r * u, 1, lam); }, 0.0L);
            },
            0.0L, static_cast<long double>(t));
        EXPECT_NEAR(static_cast<double>(v) / kernel_H(t, KernelParams(1.0, lam)), 1.0, 1e-8) << lam;
    }
}

TEST(MomentKernels, HNondecreasingNonnegative) {
    for (double lam : {0.3, 1.0, 2.5}) {
        const KernelParams kp(0.7, lam);
        double prev = 0.0;
        for (double t = 0.0; t <= 20.0; t += 0.01) {
            const double h = kernel_H(t, kp);
            EXPECT_GE(h, 0.0);
            EXPECT_GE(h, prev);
            prev = h;
        }
    }
}

TEST(MomentKernels, MonotoneInLambda) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ut(0.01, 3.0), ux(-3.0, 3.0), ul(0.05, 3.0);
    for (int i = 0; i < 500; ++i) {
        double l1 = ul(rng), l2 = ul(rng);
        if (l1 > l2) std::swap(l1, l2);
        const double t = ut(rng), x = ux(rng);
        EXPECT_LE(kernel_K(t, x, KernelParams(1.0, l1)), kernel_K(t, x, KernelParams(1.0, l2)) * (1 + 1e-14));
    }
}

TEST(MomentKernels, AsymptoticLogSlope) {
    for (double lam : {0.7, 1.0}) {
        const KernelParams kp(1.0, lam);
        // least-squares slope of log H over t in [50, 200]
        double st = 0, sy = 0, stt = 0, sty = 0;
        int n = 0;
        for (double t = 50.0; t <= 200.0; t += 5.0, ++n) {
            const double y = log_kernel_H(t, kp);
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double slope = (n * sty - st * sy) / (n * stt - st * st);
        const double target = std::pow(lam, 4) / 4.0;
        EXPECT_NEAR(slope / target, 1.0, 0.02);
    }
    EXPECT_NEAR(log_kernel_H(400.0, KernelParams(1.0, 1.0)), std::log(kernel_H(400.0, KernelParams(1.0, 1.0))), 1e-12);
}

TEST(MomentKernels, Variants) {
    const auto q = GrowthEnvelope::quasi_linear(1.3, 0.4);
    for (double t : {0.1, 1.0})
        for (double x : {0.0, 0.7}) {
            const double plain = kernel_K(t, x, KernelParams(1.0, 1.3));
            EXPECT_EQ(kernel_variant_K(KernelVariant::upper, q, 2, t, x, 1.0), plain);
            EXPECT_EQ(kernel_variant_K(KernelVariant::lower, q, 2, t, x, 1.0), plain);
            EXPECT_EQ(kernel_variant_K(KernelVariant::hat, q, 2, t, x, 1.0), kernel_variant_K(KernelVariant::upper, q, 2, t, x, 1.0));
            EXPECT_EQ(kernel_variant_H(KernelVariant::hat, q, 2, t, 1.0), kernel_variant_H(KernelVariant::upper, q, 2, t, 1.0));
        }
    const auto e = GrowthEnvelope::bounds(2.0, 2.0, 0.0, 1.0, 0.0);
    EXPECT_NEAR(kernel_variant_K(KernelVariant::upper, e, 2, 1.0, 0.0, 1.0), 246.48991368875800902, 1e-11);
    EXPECT_THROW(kernel_variant_K(KernelVariant::hat, e, 3, 1.0, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(kernel_variant_K(KernelVariant::upper, e, 5, 1.0, 0.0, 1.0), InvalidArgument);
    // hat lambda = a z Lip = sqrt2 * 2 sqrt(4) * 2 for p = 4 with no offset
    EXPECT_NEAR(variant_lambda(KernelVariant::hat, e, 4), kSqrt2 * 4.0 * 2.0, 1e-14);
    const auto ev = GrowthEnvelope::bounds(2.0, 2.0, 0.5, 1.0, 0.0);
    EXPECT_NEAR(variant_lambda(KernelVariant::hat, ev, 4), std::pow(2.0, 0.75) * 4.0 * 2.0, 1e-14);
}

TEST(MomentKernels, BdgConstants) {
    EXPECT_EQ(BdgConstants::z(2), 1.0);
    for (int p = 4; p <= 20; p += 2) {
        const auto b0 = BdgConstants::make(p, false), b1 = BdgConstants::make(p, true);
        EXPECT_LE(b0.z_p, 2.0 * std::sqrt(p) + 1e-15);
        EXPECT_EQ(b0.a_p_vip, kSqrt2);
        EXPECT_NEAR(b1.a_p_vip, std::pow(2.0, (p - 1.0) / p), 1e-15);
        EXPECT_LE(b1.a_p_vip, 2.0);
    }
    EXPECT_EQ(BdgConstants::make(2, true).a_p_vip, 1.0);
    EXPECT_THROW(BdgConstants::make(3, false), InvalidArgument);
    EXPECT_THROW(BdgConstants::make(0, false), InvalidArgument);
}

TEST(MomentKernels, EnvelopeValidation) {
    EXPECT_THROW(GrowthEnvelope::bounds(1.0, 1.0, 0.0, 2.0, 0.0), InvalidArgument);
    EXPECT_THROW(GrowthEnvelope::bounds(1.0, 1.0, -0.1, 0.5, 0.0), InvalidArgument);
    const auto q = GrowthEnvelope::quasi_linear(-2.0, 0.3);
    EXPECT_EQ(q.Lip_up, 2.0);
    EXPECT_EQ(q.lip_low, 2.0);
    EXPECT_EQ(q.Vip_up, 0.3);
}
