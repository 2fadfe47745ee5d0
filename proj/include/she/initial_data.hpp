#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "she/errors.hpp"
#include "she/quadrature.hpp"
#include "she/special_functions.hpp"

namespace she {

enum class TailKind { compact, polynomial, exponential, custom };

// Growth class of |f(x)| as |x| -> infinity.
struct TailClass {
    TailKind kind = TailKind::polynomial;
    double lo = 0.0, hi = 0.0;      // compact: support inside [lo, hi]
    double degree = 0.0;            // polynomial: |f(x)| <= C (1+|x|)^degree
    double rate = 0.0, power = 1.0; // exponential: |f(x)| <= C exp(rate |x|^power)
    double beta = 0.0;              // custom: declared sup{b : int e^{b|x|}|f| < inf}
    double radius = 0.0;            // custom: f vanishes outside [-radius, radius]

    static TailClass compact(double lo, double hi) {
        if (!(lo <= hi)) throw InvalidArgument("compact tail: lo > hi");
        TailClass c;
        c.kind = TailKind::compact;
        c.lo = lo;
        c.hi = hi;
        return c;
    }
    static TailClass polynomial(double degree) {
        TailClass c;
        c.kind = TailKind::polynomial;
        c.degree = degree;
        return c;
    }
    static TailClass exponential(double rate, double power) {
        if (!(power > 0.0)) throw InvalidArgument("exponential tail: power must be > 0");
        TailClass c;
        c.kind = TailKind::exponential;
        c.rate = rate;
        c.power = power;
        return c;
    }
    static TailClass custom(double beta, double radius) {
        if (!(radius > 0.0)) throw InvalidArgument("custom tail: radius must be > 0");
        TailClass c;
        c.kind = TailKind::custom;
        c.beta = beta;
        c.radius = radius;
        return c;
    }

    // log of the envelope at distance r = |x| from the origin
    double log_envelope(double r) const {
        switch (kind) {
            case TailKind::compact:
                return 0.0;
            case TailKind::polynomial:
                return degree * std::log1p(r);
            case TailKind::exponential:
                return rate * std::pow(r, power);
            case TailKind::custom:
                return 0.0;
        }
        return 0.0;
    }
};

struct Density {
    std::string name;
    std::function<double(double)> f;
    TailClass tail;
    std::vector<double> breakpoints;  // kinks and centres, used as quadrature breaks
    // optional closed form of (G_nu(t) * f)(x) as a function of (nu, t, x)
    std::function<double(double, double, double)> heat_flow;
    bool nonnegative = true;
    bool symmetric = false;
    bool lebesgue = false;
};

struct Atom {
    double location = 0.0;
    double mass = 1.0;
};

struct WeightedDensity {
    double weight = 1.0;
    Density density;
};

namespace detail {

inline std::vector<double> sample_abscissae() {
    std::vector<double> ys;
    for (int k = -32; k <= 32; ++k) ys.push_back(0.125 * k);
    for (int k = 2; k <= 9; ++k) {
        ys.push_back(std::ldexp(1.0, k));
        ys.push_back(-std::ldexp(1.0, k));
    }
    return ys;
}

// Estimate of C in |f(y)| <= C * envelope(|y|).
inline double envelope_constant(const Density& d) {
    double c = 0.0;
    for (double y : sample_abscissae()) {
        const double le = d.tail.log_envelope(std::abs(y));
        if (le > 700.0) continue;
        const double v = std::abs(d.f(y));
        if (v == 0.0 || !std::isfinite(v)) continue;
        c = std::max(c, std::exp(std::log(v) - le));
    }
    return c;
}

}  // namespace detail

// Spot check that the declared tail class is compatible with the density.
inline bool tail_consistent(const Density& d) {
    const TailClass& tc = d.tail;
    auto ys = detail::sample_abscissae();
    if (tc.kind == TailKind::compact || tc.kind == TailKind::custom) {
        const double lo = tc.kind == TailKind::compact ? tc.lo : -tc.radius;
        const double hi = tc.kind == TailKind::compact ? tc.hi : tc.radius;
        for (double y : ys)
            if ((y < lo || y > hi) && d.f(y) != 0.0) return false;
        return true;
    }
    double near = 0.0, far = 0.0;
    for (double y : ys) {
        const double le = tc.log_envelope(std::abs(y));
        if (le > 700.0) continue;  // envelope itself is not representable here
        const double v = std::abs(d.f(y));
        if (!std::isfinite(v)) return false;
        if (v == 0.0) continue;
        const double ratio = std::exp(std::log(v) - le);
        double& slot = std::abs(y) <= 4.0 ? near : far;
        slot = std::max(slot, ratio);
    }
    return far <= 1e6 * std::max(near, 1e-300);
}

class InitialMeasure {
public:
    InitialMeasure() = default;

    static InitialMeasure lebesgue(double weight = 1.0) {
        Density d;
        d.name = "lebesgue";
        d.f = [](double) { return 1.0; };
        d.tail = TailClass::polynomial(0.0);
        d.heat_flow = [](double, double, double) { return 1.0; };
        d.symmetric = true;
        d.lebesgue = true;
        return from_density(std::move(d), weight);
    }

    static InitialMeasure dirac(double location = 0.0, double mass = 1.0) {
        return from_atoms({{location, mass}});
    }

    static InitialMeasure from_atoms(std::vector<Atom> atoms) {
        InitialMeasure m;
        for (const auto& a : atoms) {
            if (!std::isfinite(a.location) || !std::isfinite(a.mass)) throw InvalidArgument("atom must be finite");
            if (a.mass != 0.0) m.atoms_.push_back(a);
        }
        m.name_ = "atoms";
        return m;
    }

    // e^{-a|x|} dx, a > 0
    static InitialMeasure exp_decay(double a) {
        if (!(a > 0.0)) throw InvalidArgument("exp_decay: rate must be > 0");
        Density d;
        d.name = "exp_decay";
        d.f = [a](double y) { return std::exp(-a * std::abs(y)); };
        d.tail = TailClass::exponential(-a, 1.0);
        d.breakpoints = {0.0};
        d.heat_flow = [a](double nu, double t, double x) {
            const double s = std::sqrt(2.0 * nu * t);
            const double base = 0.5 * a * a * nu * t;
            return 0.5 * (exp_erfc(base - a * x, (a * nu * t - x) / s) + exp_erfc(base + a * x, (a * nu * t + x) / s));
        };
        d.symmetric = true;
        return from_density(std::move(d));
    }

    // e^{a|x|^p} dx
    static InitialMeasure exp_growth(double a, double p) {
        if (!(p > 0.0)) throw InvalidArgument("exp_growth: power must be > 0");
        Density d;
        d.name = "exp_growth";
        d.f = [a, p](double y) { return std::exp(a * std::pow(std::abs(y), p)); };
        d.tail = TailClass::exponential(a, p);
        d.breakpoints = {0.0};
        d.symmetric = true;
        return from_density(std::move(d));
    }

    // unit-height bump exp(-(x-c)^2/(2 w^2)) dx
    static InitialMeasure gaussian_bump(double c, double w) {
        if (!(w > 0.0)) throw InvalidArgument("gaussian_bump: width must be > 0");
        Density d;
        d.name = "gaussian_bump";
        d.f = [c, w](double y) {
            const double z = (y - c) / w;
            return std::exp(-0.5 * z * z);
        };
        // (y-c)^2/2 >= y^2/4 - c^2/2, so half the rate dominates for any centre
        d.tail = TailClass::exponential(-0.25 / (w * w), 2.0);
        d.breakpoints = {c};
        d.heat_flow = [c, w](double nu, double t, double x) {
            const double v = w * w + nu * t;
            return w / std::sqrt(v) * std::exp(-0.5 * (x - c) * (x - c) / v);
        };
        d.symmetric = c == 0.0;
        return from_density(std::move(d));
    }

    // 1_{[l,r]}(x) dx
    static InitialMeasure indicator(double l, double r) {
        if (!(l < r)) throw InvalidArgument("indicator: need l < r");
        Density d;
        d.name = "indicator";
        d.f = [l, r](double y) { return (y >= l && y <= r) ? 1.0 : 0.0; };
        d.tail = TailClass::compact(l, r);
        d.breakpoints = {l, r};
        d.heat_flow = [l, r](double nu, double t, double x) {
            const double s = std::sqrt(2.0 * nu * t);
            if (x < 0.5 * (l + r)) return 0.5 * (std::erfc((l - x) / s) - std::erfc((r - x) / s));
            return 0.5 * (std::erfc((x - r) / s) - std::erfc((x - l) / s));
        };
        d.symmetric = l == -r;
        return from_density(std::move(d));
    }

    static InitialMeasure from_density(Density d, double weight = 1.0) {
        if (!d.f) throw InvalidArgument("density needs an evaluable function");
        if (!std::isfinite(weight)) throw InvalidArgument("density weight must be finite");
        if (!d.lebesgue && !tail_consistent(d))
            throw InvalidArgument("density '" + d.name + "' is inconsistent with its declared tail class");
        InitialMeasure m;
        m.name_ = d.name;
        if (weight != 0.0) m.densities_.push_back({weight, std::move(d)});
        return m;
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<WeightedDensity>& densities() const { return densities_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    bool is_zero() const { return atoms_.empty() && densities_.empty(); }
    bool is_lebesgue() const { return atoms_.empty() && densities_.size() == 1 && densities_[0].density.lebesgue; }
    bool is_pure_atomic() const { return densities_.empty() && !atoms_.empty(); }

    bool is_nonnegative() const {
        for (const auto& a : atoms_)
            if (a.mass < 0.0) return false;
        for (const auto& d : densities_)
            if (d.weight < 0.0 || !d.density.nonnegative) return false;
        return true;
    }

    bool is_symmetric() const {
        for (const auto& d : densities_)
            if (!d.density.symmetric) return false;
        std::map<double, double> mass;
        for (const auto& a : atoms_) mass[a.location] += a.mass;
        for (const auto& [loc, m] : mass) {
            auto it = mass.find(-loc);
            if (it == mass.end() || it->second != m) return false;
        }
        return true;
    }

    // atom locations and density breakpoints
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (const auto& a : atoms_) b.push_back(a.location);
        for (const auto& d : densities_) {
            b.insert(b.end(), d.density.breakpoints.begin(), d.density.breakpoints.end());
            if (d.density.tail.kind == TailKind::compact) {
                b.push_back(d.density.tail.lo);
                b.push_back(d.density.tail.hi);
            }
        }
        return detail::sorted_unique(b);
    }

    // Jordan parts obtained by sign splitting of atoms and density weights.
    InitialMeasure positive_part() const { return sign_part(+1); }
    InitialMeasure negative_part() const { return sign_part(-1); }
    InitialMeasure total_variation() const {
        InitialMeasure p = positive_part(), n = negative_part();
        return linear_combination(1.0, p, 1.0, n);
    }

    friend InitialMeasure linear_combination(double a, const InitialMeasure& m1, double b, const InitialMeasure& m2) {
        InitialMeasure out;
        std::map<double, double> mass;
        for (const auto& at : m1.atoms_) mass[at.location] += a * at.mass;
        for (const auto& at : m2.atoms_) mass[at.location] += b * at.mass;
        for (const auto& [loc, m] : mass)
            if (m != 0.0) out.atoms_.push_back({loc, m});
        for (const auto& d : m1.densities_)
            if (a * d.weight != 0.0) out.densities_.push_back({a * d.weight, d.density});
        for (const auto& d : m2.densities_)
            if (b * d.weight != 0.0) out.densities_.push_back({b * d.weight, d.density});
        out.name_ = "combination";
        return out;
    }

private:
    InitialMeasure sign_part(int sign) const {
        InitialMeasure out;
        std::map<double, double> mass;
        for (const auto& a : atoms_) mass[a.location] += a.mass;
        for (const auto& [loc, m] : mass)
            if (m * sign > 0.0) out.atoms_.push_back({loc, std::abs(m)});
        for (const auto& wd : densities_) {
            if (wd.density.nonnegative) {
                if (wd.weight * sign > 0.0) out.densities_.push_back({std::abs(wd.weight), wd.density});
                continue;
            }
            Density part = wd.density;
            const double s = wd.weight > 0.0 ? sign : -sign;
            auto f = wd.density.f;
            part.f = [f, s](double y) { return std::max(s * f(y), 0.0); };
            part.heat_flow = nullptr;
            part.nonnegative = true;
            part.name = wd.density.name + (s > 0 ? "+" : "-");
            out.densities_.push_back({std::abs(wd.weight), std::move(part)});
        }
        out.name_ = name_ + (sign > 0 ? "+" : "-");
        return out;
    }

    std::vector<Atom> atoms_;
    std::vector<WeightedDensity> densities_;
    std::string name_ = "zero";
};

// True iff (|mu| * G_nu(t))(x) < infinity, decided from the tail classes.
inline bool check_j0_finite(const InitialMeasure& mu, double nu, double t, double x) {
    (void)x;
    if (!(t > 0.0)) throw InvalidArgument("check_j0_finite: t must be > 0");
    if (!(nu > 0.0)) throw InvalidArgument("check_j0_finite: nu must be > 0");
    for (const auto& wd : mu.densities()) {
        const TailClass& tc = wd.density.tail;
        if (tc.kind != TailKind::exponential || tc.rate <= 0.0) continue;
        if (tc.power < 2.0) continue;
        if (tc.power > 2.0) return false;
        if (!(2.0 * tc.rate * nu * t < 1.0)) return false;
    }
    return true;
}

// sup{beta >= 0 : int e^{beta|x|} |mu|(dx) < infinity}
inline double exp_tail_rate(const InitialMeasure& mu) {
    double beta = kInf;
    for (const auto& wd : mu.densities()) {
        const TailClass& tc = wd.density.tail;
        double b = 0.0;
        switch (tc.kind) {
            case TailKind::compact:
                b = kInf;
                break;
            case TailKind::polynomial:
                b = 0.0;
                break;
            case TailKind::exponential:
                if (tc.rate >= 0.0) b = 0.0;
                else if (tc.power > 1.0) b = kInf;
                else if (tc.power == 1.0) b = -tc.rate;
                else b = 0.0;
                break;
            case TailKind::custom:
                b = tc.beta;
                break;
        }
        beta = std::min(beta, b);
    }
    return beta;
}

namespace detail {

// C * int_{|z|>R} G(t,z) * worst-case envelope at distance z from x.
inline double truncation_tail_bound(const TailClass& tc, double c, double nu, double t, double x, double r) {
    const double ax = std::abs(x);
    auto integrand = [&](double z) {
        const double le = std::max(tc.log_envelope(ax + z), tc.log_envelope(std::max(0.0, ax - z)));
        const double lg = log_heat_kernel(nu, t, z);
        return std::exp(le + lg);
    };
    const double scale = std::sqrt(nu * t);
    auto mapped = [&](double v) {
        const double om = 1.0 - v;
        const double val = integrand(r + scale * v / om);
        return val == 0.0 ? 0.0 : val * scale / (om * om);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-6;
    const QuadResult q = integrate(mapped, 0.0, 1.0, opt);
    return 2.0 * c * q.value;
}

}  // namespace detail

// (G_nu(t) * f)(x) for a density by adaptive quadrature, relative tolerance rel_tol.
inline double density_heat_flow_quadrature(const Density& d, double nu, double t, double x, double rel_tol = 1e-8) {
    const double sd = std::sqrt(nu * t);
    auto integrand = [&](double y) {
        const double g = heat_kernel(nu, t, x - y);
        if (g == 0.0) return 0.0;
        return g * d.f(y);
    };
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    const TailClass& tc = d.tail;
    if (tc.kind == TailKind::compact || tc.kind == TailKind::custom) {
        const double lo = tc.kind == TailKind::compact ? tc.lo : -tc.radius;
        const double hi = tc.kind == TailKind::compact ? tc.hi : tc.radius;
        if (lo == hi) return 0.0;
        std::vector<double> pts{lo, hi};
        for (double b : d.breakpoints) pts.push_back(b);
        for (double k : {-8.0, -4.0, -1.0, 0.0, 1.0, 4.0, 8.0}) pts.push_back(x + k * sd);
        pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double p) { return p < lo || p > hi; }), pts.end());
        return integrate_breaks(integrand, pts, opt).value;
    }
    const double c = detail::envelope_constant(d);
    double r = 8.0 * sd;
    for (int iter = 0; iter < 60; ++iter) {
        std::vector<double> pts{x - r, x + r, x};
        for (double k : {-4.0, -1.0, 1.0, 4.0}) pts.push_back(x + k * sd);
        for (double b : d.breakpoints)
            if (b > x - r && b < x + r) pts.push_back(b);
        const QuadResult q = integrate_breaks(integrand, pts, opt);
        if (!std::isfinite(q.value)) break;
        const double tail = detail::truncation_tail_bound(tc, c, nu, t, x, r);
        if (tail <= 1e-12 * std::abs(q.value) || tail < 1e-300) return q.value;
        if (!std::isfinite(tail)) break;
        r *= 2.0;
    }
    throw DivergentJ0("heat flow of density '" + d.name + "' has an infinite tail bound");
}

inline double density_heat_flow(const Density& d, double nu, double t, double x) {
    if (d.lebesgue) return 1.0;
    if (d.heat_flow) return d.heat_flow(nu, t, x);
    return density_heat_flow_quadrature(d, nu, t, x);
}

enum class J0Path { automatic, quadrature };

// J0(t,x) = (mu * G_nu(t))(x); positive and negative parts are accumulated separately.
inline double j0(const InitialMeasure& mu, double nu, double t, double x, J0Path path = J0Path::automatic) {
    if (!(t > 0.0)) throw InvalidArgument("j0: t must be > 0");
    if (!check_j0_finite(mu, nu, t, x)) throw DivergentJ0("j0: |mu| * G is infinite at the requested (t, x)");
    double pos = 0.0, neg = 0.0;
    for (const auto& a : mu.atoms()) {
        const double g = heat_kernel(nu, t, x - a.location);
        (a.mass > 0.0 ? pos : neg) += std::abs(a.mass) * g;
    }
    for (const auto& wd : mu.densities()) {
        const Density& d = wd.density;
        auto flow = [&](const Density& dd) {
            if (path == J0Path::quadrature && !dd.lebesgue) return density_heat_flow_quadrature(dd, nu, t, x);
            return density_heat_flow(dd, nu, t, x);
        };
        if (d.nonnegative) {
            (wd.weight > 0.0 ? pos : neg) += std::abs(wd.weight) * flow(d);
            continue;
        }
        Density part = d;
        part.heat_flow = nullptr;
        part.f = [&d](double y) { return std::max(d.f(y), 0.0); };
        const double up = flow(part);
        part.f = [&d](double y) { return std::max(-d.f(y), 0.0); };
        const double down = flow(part);
        if (wd.weight > 0.0) {
            pos += wd.weight * up;
            neg += wd.weight * down;
        } else {
            pos += -wd.weight * down;
            neg += -wd.weight * up;
        }
    }
    return pos - neg;
}

// Non-measure input for the divergence demonstration: mass * (d/dx)^order delta_location.
struct DistributionalInput {
    int order = 1;
    double location = 0.0;
    double mass = 1.0;
};

// <mass * delta^(order)_a, G(t, x - .)>; order 0 and 1 are supported.
inline double j0_distributional(const DistributionalInput& in, double nu, double t, double x) {
    if (!(t > 0.0)) throw InvalidArgument("j0_distributional: t must be > 0");
    const double g = heat_kernel(nu, t, x - in.location);
    switch (in.order) {
        case 0:
            return in.mass * g;
        case 1:
            return -in.mass * (x - in.location) / (nu * t) * g;
        default:
            throw InvalidArgument("j0_distributional: only orders 0 and 1 are supported");
    }
}

}  // namespace she
