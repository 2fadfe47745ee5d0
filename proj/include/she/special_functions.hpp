#pragma once

#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>

#include "she/errors.hpp"

namespace she {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Diffusion coefficient and noise intensity of the equation.
struct KernelParams {
    double nu = 1.0;
    double lambda = 1.0;

    KernelParams() = default;
    KernelParams(double nu_, double lambda_) : nu(nu_), lambda(lambda_) { validate(); }

    void validate() const {
        if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("KernelParams: nu must be finite and > 0");
        if (lambda == 0.0 || !std::isfinite(lambda)) throw InvalidArgument("KernelParams: lambda must be finite and nonzero");
    }
};

// glibc's erf/erfc are correctly rounded to within 1 ulp on the whole real line.
inline double erf(double x) { return std::erf(x); }
inline double erfc(double x) { return std::erfc(x); }

// Phi(x) = erfc(-x/sqrt2)/2; going through erfc keeps full relative accuracy in the left tail.
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Scaled complementary error function exp(x^2) erfc(x).
inline double erfcx(double x) {
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic series; at x >= 25 ten terms reach 1e-22
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 10; ++n) {
        term *= -(2.0 * n - 1.0) * inv2x2;
        sum += term;
    }
    return sum * kInvSqrtPi / x;
}

// exp(a) * erfc(z) without intermediate overflow or underflow.
inline double exp_erfc(double a, double z) {
    if (z <= 0.0) return std::exp(a) * std::erfc(z);
    return std::exp(a - z * z) * erfcx(z);
}

inline double log_min_normal() { return std::log(DBL_MIN); }

// G_nu(t,x) = (2 pi nu t)^{-1/2} exp(-x^2/(2 nu t)); zero for t <= 0.
inline double heat_kernel(double nu, double t, double x) {
    if (!(nu > 0.0)) throw InvalidArgument("heat_kernel: nu must be > 0");
    if (t <= 0.0) return 0.0;
    const double e = -x * x / (2.0 * nu * t);
    if (e < log_min_normal()) return 0.0;
    return std::exp(e) / std::sqrt(2.0 * kPi * nu * t);
}

inline double log_heat_kernel(double nu, double t, double x) {
    if (!(nu > 0.0)) throw InvalidArgument("log_heat_kernel: nu must be > 0");
    if (t <= 0.0) return -kInf;
    return -x * x / (2.0 * nu * t) - 0.5 * std::log(2.0 * kPi * nu * t);
}

}  // namespace she
