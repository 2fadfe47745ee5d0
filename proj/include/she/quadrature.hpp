#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <span>
#include <vector>

#include "she/errors.hpp"

namespace she {

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_subdivisions = 4000;
    int initial_pieces = 1;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    int piece;
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// 15-point Kronrod rule with the QUADPACK error heuristic.
template <class F>
Segment gk15(F& f, int piece, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(piece, c);
    double resk = fc * kKronrodWeights[7];
    double resg = fc * kGaussWeights[3];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGkNodes[j];
        fv1[j] = f(piece, c - dx);
        fv2[j] = f(piece, c + dx);
        resk += kKronrodWeights[j] * (fv1[j] + fv2[j]);
        resabs += kKronrodWeights[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += kGaussWeights[j / 2] * (fv1[j] + fv2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kKronrodWeights[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    const double ah = std::abs(h);
    double err = std::abs((resk - resg) * h);
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {piece, a, b, resk * h, err};
}

struct Piece {
    int id;
    double a, b;
};

// Globally adaptive integration over a union of pieces; f(piece_id, u).
template <class F>
QuadResult adaptive(F& f, std::span<const Piece> pieces, const QuadOptions& opt) {
    std::vector<Segment> heap;
    QuadResult r;
    const int init = std::max(1, opt.initial_pieces);
    for (const auto& p : pieces) {
        if (!(p.b > p.a)) continue;
        const double w = (p.b - p.a) / init;
        for (int k = 0; k < init; ++k) {
            const double a = p.a + k * w;
            const double b = (k + 1 == init) ? p.b : p.a + (k + 1) * w;
            heap.push_back(gk15(f, p.id, a, b));
            r.evaluations += 15;
        }
    }
    if (heap.empty()) {
        r.converged = true;
        return r;
    }
    std::make_heap(heap.begin(), heap.end());
    auto totals = [&] {
        double v = 0.0, e = 0.0;
        for (const auto& s : heap) {
            v += s.value;
            e += s.error;
        }
        r.value = v;
        r.error = e;
    };
    totals();
    int splits = 0;
    while (true) {
        if (!std::isfinite(r.value)) {
            r.converged = false;
            return r;
        }
        if (r.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value))) {
            r.converged = true;
            break;
        }
        if (splits >= opt.max_subdivisions) break;
        std::pop_heap(heap.begin(), heap.end());
        Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // cannot refine further at double resolution; keep the piece as is
            worst.error = 0.0;
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            totals();
            ++splits;
            continue;
        }
        Segment left = gk15(f, worst.piece, worst.a, mid);
        Segment right = gk15(f, worst.piece, mid, worst.b);
        r.evaluations += 30;
        r.value += left.value + right.value - worst.value;
        r.error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++splits;
        if (splits % 64 == 0) totals();  // limit drift of the running sums
    }
    totals();
    r.converged = r.converged && std::isfinite(r.value);
    return r;
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace detail

// Integral of f over [a, b].
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    if (a == b) return {0.0, 0.0, 0, true};
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    auto g = [&](int, double u) { return f(u); };
    const detail::Piece p{0, lo, hi};
    QuadResult r = detail::adaptive(g, std::span<const detail::Piece>(&p, 1), opt);
    r.value *= sign;
    return r;
}

// Integral over [points.front(), points.back()] with the interior points as forced breaks.
template <class F>
QuadResult integrate_breaks(F&& f, std::vector<double> points, const QuadOptions& opt = {}) {
    points = detail::sorted_unique(std::move(points));
    if (points.size() < 2) return {0.0, 0.0, 0, true};
    std::vector<detail::Piece> pieces;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) pieces.push_back({0, points[i], points[i + 1]});
    auto g = [&](int, double u) { return f(u); };
    return detail::adaptive(g, pieces, opt);
}

// Integral over the whole line. Finite pieces between the sorted breakpoints,
// tails mapped by y = b +- scale * v/(1-v).
template <class F>
QuadResult integrate_line(F&& f, std::vector<double> breakpoints, double scale, const QuadOptions& opt = {}) {
    breakpoints = detail::sorted_unique(std::move(breakpoints));
    if (breakpoints.empty()) breakpoints.push_back(0.0);
    if (!(scale > 0.0)) scale = 1.0;
    const int nb = static_cast<int>(breakpoints.size());
    // piece 0: left tail; 1..nb-1: finite; nb: right tail
    auto g = [&](int piece, double u) -> double {
        if (piece == 0) {
            const double s = (1.0 - u) / u;
            const double y = breakpoints.front() - scale * s;
            const double val = f(y);
            return val == 0.0 ? 0.0 : val * scale / (u * u);
        }
        if (piece == nb) {
            const double om = 1.0 - u;
            const double y = breakpoints.back() + scale * u / om;
            const double val = f(y);
            return val == 0.0 ? 0.0 : val * scale / (om * om);
        }
        const double a = breakpoints[piece - 1], b = breakpoints[piece];
        return f(a + u * (b - a)) * (b - a);
    };
    std::vector<detail::Piece> pieces;
    pieces.push_back({0, 0.0, 1.0});
    for (int i = 1; i < nb; ++i) pieces.push_back({i, 0.0, 1.0});
    pieces.push_back({nb, 0.0, 1.0});
    return detail::adaptive(g, pieces, opt);
}

// Integral over [a, b] of f with possible inverse-square-root endpoint singularities.
// Near a singular end s = end +- u^2 removes the singularity. Extra breaks are honoured.
template <class F>
QuadResult integrate_sqrt_ends(F&& f, double a, double b, bool singular_left, bool singular_right,
                               std::vector<double> breaks = {}, const QuadOptions& opt = {}) {
    if (!(b > a)) return {0.0, 0.0, 0, true};
    double split = 0.5 * (a + b);
    if (!singular_left && !singular_right) {
        breaks.push_back(a);
        breaks.push_back(b);
        std::vector<double> pts;
        for (double x : breaks)
            if (x >= a && x <= b) pts.push_back(x);
        return integrate_breaks(f, pts, opt);
    }
    if (singular_left && !singular_right) split = b;
    if (!singular_left && singular_right) split = a;
    std::vector<double> left_pts{0.0}, right_pts{0.0};
    if (singular_left) left_pts.push_back(std::sqrt(split - a));
    if (singular_right) right_pts.push_back(std::sqrt(b - split));
    for (double x : breaks) {
        if (!(x > a && x < b)) continue;
        if (singular_left && x < split) left_pts.push_back(std::sqrt(x - a));
        else if (singular_right && x > split) right_pts.push_back(std::sqrt(b - x));
    }
    // piece id 0 = left substitution, 1 = right substitution
    auto g = [&](int piece, double u) -> double {
        if (piece == 0) {
            const double s = a + u * u;
            const double v = f(s);
            return v == 0.0 ? 0.0 : 2.0 * u * v;
        }
        const double s = b - u * u;
        const double v = f(s);
        return v == 0.0 ? 0.0 : 2.0 * u * v;
    };
    std::vector<detail::Piece> pieces;
    if (singular_left) {
        left_pts = detail::sorted_unique(left_pts);
        for (std::size_t i = 0; i + 1 < left_pts.size(); ++i) pieces.push_back({0, left_pts[i], left_pts[i + 1]});
    }
    if (singular_right) {
        right_pts = detail::sorted_unique(right_pts);
        for (std::size_t i = 0; i + 1 < right_pts.size(); ++i) pieces.push_back({1, right_pts[i], right_pts[i + 1]});
    }
    return detail::adaptive(g, pieces, opt);
}

struct TailIntegral {
    double value = 0.0;
    bool divergent = false;
    int pieces = 0;
};

// Integral of f over (0, t] on dyadic pieces [t 2^{-j-1}, t 2^{-j}]; declares
// divergence when the piece contributions stop shrinking.
template <class F>
TailIntegral integrate_toward_zero(F&& f, double t, double rel_tol = 1e-10, int max_pieces = 1000) {
    TailIntegral out;
    double hi = t, prev = 0.0;
    int growing = 0, small = 0;
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    for (int j = 0; j < max_pieces; ++j) {
        const double lo = 0.5 * hi;
        const QuadResult q = integrate(f, lo, hi, opt);
        ++out.pieces;
        if (!std::isfinite(q.value)) {
            out.value = std::numeric_limits<double>::infinity();
            out.divergent = true;
            return out;
        }
        out.value += q.value;
        const double mag = std::abs(q.value);
        if (j > 0 && mag >= 0.999 * std::abs(prev) && mag > 0.0) {
            if (++growing >= 8) {
                out.divergent = true;
                out.value = std::copysign(std::numeric_limits<double>::infinity(), out.value);
                return out;
            }
        } else {
            growing = 0;
        }
        if (mag <= rel_tol * std::abs(out.value) || (mag == 0.0 && j > 4)) {
            if (++small >= 3) return out;
        } else {
            small = 0;
        }
        prev = q.value;
        hi = lo;
        if (!(hi > 0.0)) break;
    }
    return out;
}

// n-point Gauss-Legendre rule on [0, 1] (Newton on P_n from Chebyshev starts).
struct FixedRule {
    std::vector<double> nodes, weights;
};

inline FixedRule gauss_legendre01(std::size_t n) {
    if (n == 0) throw InvalidArgument("gauss_legendre01: n must be >= 1");
    FixedRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * z * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            dp = dn * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

}  // namespace she
