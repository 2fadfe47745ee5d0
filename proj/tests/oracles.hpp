#pragma once
// Independent reference implementations for the unit tests (Boost.Math, long double).

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

namespace oracle {

using LD = long double;

inline LD pi() { return std::numbers::pi_v<LD>; }
inline LD Phi(LD x) { return boost::math::erfc(-x / std::sqrt(LD(2))) / 2; }
inline LD G(LD nu, LD t, LD x) {
    if (t <= 0) return 0;
    return std::exp(-x * x / (2 * nu * t)) / std::sqrt(2 * pi() * nu * t);
}
inline LD K(LD t, LD x, LD nu, LD l) {
    const LD l2 = l * l, l4 = l2 * l2;
    return G(nu / 2, t, x) * (l2 / std::sqrt(4 * pi() * nu * t) + l4 / (2 * nu) * std::exp(l4 * t / (4 * nu)) * Phi(l2 * std::sqrt(t / (2 * nu))));
}
inline LD H(LD t, LD nu, LD l) {
    const LD l2 = l * l;
    return 2 * std::exp(l2 * l2 * t / (4 * nu)) * Phi(l2 * std::sqrt(t / (2 * nu))) - 1;
}

// int_a^b f, tanh-sinh (tolerates endpoint singularities)
template <class F>
LD finite(F f, LD a, LD b) {
    boost::math::quadrature::tanh_sinh<LD> q;
    return q.integrate(f, a, b);
}
// int_R f
template <class F>
LD line(F f) {
    boost::math::quadrature::sinh_sinh<LD> q;
    return q.integrate(f);
}
// int_a^inf f
template <class F>
LD half_line(F f, LD a) {
    boost::math::quadrature::exp_sinh<LD> q;
    return q.integrate([&](LD u) { return f(a + u); }, LD(0), std::numeric_limits<LD>::infinity());
}

// int_R f with f split at c (use at kinks and at the centre of narrow bumps)
template <class F>
LD line_at(F f, LD c) {
    return half_line(f, c) + half_line([&](LD y) { return f(2 * c - y); }, c);
}

}  // namespace oracle
