#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "she/errors.hpp"
#include "she/special_functions.hpp"

namespace she {

// k(t) = K(t,x) / G_{nu/2}(t,x): the purely temporal factor of the kernel.
inline double kernel_time_factor(double t, const KernelParams& kp) {
    if (!(t > 0.0)) throw InvalidArgument("kernel time factor: t must be > 0");
    const double l2 = kp.lambda * kp.lambda, l4 = l2 * l2;
    const double c = l4 * t / (4.0 * kp.nu);
    return l2 / std::sqrt(4.0 * kPi * kp.nu * t) + l4 / (2.0 * kp.nu) * std::exp(c) * std_normal_cdf(l2 * std::sqrt(t / (2.0 * kp.nu)));
}

inline double kernel_K(double t, double x, const KernelParams& kp) {
    if (!(t > 0.0)) throw InvalidArgument("kernel_K: t must be > 0");
    kp.validate();
    const double g = heat_kernel(kp.nu / 2.0, t, x);
    if (g == 0.0) return 0.0;
    return g * kernel_time_factor(t, kp);
}

// H(t) = 2 e^{c} Phi(z) - 1 = 2 expm1(c) Phi(z) + erf(z/sqrt2), free of cancellation for small t.
inline double kernel_H(double t, const KernelParams& kp) {
    if (t < 0.0) throw InvalidArgument("kernel_H: t must be >= 0");
    kp.validate();
    if (t == 0.0) return 0.0;
    const double l2 = kp.lambda * kp.lambda;
    const double c = l2 * l2 * t / (4.0 * kp.nu);
    const double z = l2 * std::sqrt(t / (2.0 * kp.nu));
    return 2.0 * std::expm1(c) * std_normal_cdf(z) + std::erf(z / kSqrt2);
}

// log H(t), usable where H itself overflows.
inline double log_kernel_H(double t, const KernelParams& kp) {
    if (!(t > 0.0)) return -kInf;
    const double l2 = kp.lambda * kp.lambda;
    const double c = l2 * l2 * t / (4.0 * kp.nu);
    if (c < 30.0) return std::log(kernel_H(t, kp));
    const double phi2 = 2.0 * std_normal_cdf(l2 * std::sqrt(t / (2.0 * kp.nu)));
    return c + std::log(phi2) + std::log1p(-std::exp(-c) / phi2);
}

// Growth envelope of rho: |rho(u)|^2 <= Lip^2 (vv^2 + u^2) from above, >= lip^2 (vv_low^2 + u^2) from below.
struct GrowthEnvelope {
    double LIP = 0.0;
    double Lip_up = 0.0;
    double Vip_up = 0.0;
    double lip_low = 0.0;
    double vip_low = 0.0;
    struct Quasi {
        double lambda;
        double vv;
    };
    std::optional<Quasi> quasi;

    static GrowthEnvelope quasi_linear(double lambda, double vv) {
        GrowthEnvelope e;
        e.LIP = std::abs(lambda);
        e.Lip_up = e.lip_low = std::abs(lambda);
        e.Vip_up = e.vip_low = std::abs(vv);
        e.quasi = Quasi{lambda, std::abs(vv)};
        e.validate();
        return e;
    }

    static GrowthEnvelope bounds(double LIP, double Lip_up, double Vip_up, double lip_low, double vip_low) {
        GrowthEnvelope e;
        e.LIP = LIP;
        e.Lip_up = Lip_up;
        e.Vip_up = Vip_up;
        e.lip_low = lip_low;
        e.vip_low = vip_low;
        e.validate();
        return e;
    }

    void validate() const {
        if (!(Lip_up >= 0.0) || !(lip_low >= 0.0) || !(LIP >= 0.0)) throw InvalidArgument("GrowthEnvelope: constants must be >= 0");
        if (!(Vip_up >= 0.0) || !(vip_low >= 0.0)) throw InvalidArgument("GrowthEnvelope: offsets must be >= 0");
        if (lip_low > Lip_up) throw InvalidArgument("GrowthEnvelope: lip_low must not exceed Lip_up");
        if (quasi) {
            const double l = std::abs(quasi->lambda);
            if (Lip_up != l || lip_low != l || Vip_up != quasi->vv || vip_low != quasi->vv)
                throw InvalidArgument("GrowthEnvelope: quasi-linear constants must coincide with (|lambda|, vv)");
        }
    }
};

// BDG constant z_p and the factor a_{p,vv} multiplying it in the hat kernel.
struct BdgConstants {
    int p = 2;
    double z_p = 1.0;
    double a_p_vip = 1.0;

    static double z(int p) {
        if (p < 2 || p % 2 != 0) throw InvalidArgument("BDG constant: p must be an even integer >= 2");
        return p == 2 ? 1.0 : 2.0 * std::sqrt(static_cast<double>(p));
    }

    static BdgConstants make(int p, bool vip_nonzero) {
        BdgConstants b;
        b.p = p;
        b.z_p = z(p);
        if (p == 2) b.a_p_vip = 1.0;
        else if (!vip_nonzero) b.a_p_vip = kSqrt2;
        else b.a_p_vip = std::pow(2.0, (p - 1.0) / p);
        return b;
    }
};

enum class KernelVariant { upper, lower, hat };

inline std::string to_string(KernelVariant v) {
    switch (v) {
        case KernelVariant::upper:
            return "upper";
        case KernelVariant::lower:
            return "lower";
        case KernelVariant::hat:
            return "hat";
    }
    return "?";
}

// The lambda substituted into K and H for each variant.
inline double variant_lambda(KernelVariant kind, const GrowthEnvelope& env, int p) {
    if (p < 2 || p % 2 != 0) throw InvalidArgument("kernel variant: p must be an even integer >= 2");
    switch (kind) {
        case KernelVariant::upper:
            return env.Lip_up;
        case KernelVariant::lower:
            return env.lip_low;
        case KernelVariant::hat: {
            const BdgConstants b = BdgConstants::make(p, env.Vip_up != 0.0);
            return b.a_p_vip * b.z_p * env.Lip_up;
        }
    }
    return 0.0;
}

inline double kernel_variant_K(KernelVariant kind, const GrowthEnvelope& env, int p, double t, double x, double nu) {
    const double l = variant_lambda(kind, env, p);
    if (!(t > 0.0)) throw InvalidArgument("kernel variant: t must be > 0");
    if (l == 0.0) return 0.0;
    return kernel_K(t, x, KernelParams(nu, l));
}

inline double kernel_variant_H(KernelVariant kind, const GrowthEnvelope& env, int p, double t, double nu) {
    const double l = variant_lambda(kind, env, p);
    if (l == 0.0) return 0.0;
    return kernel_H(t, KernelParams(nu, l));
}

}  // namespace she
