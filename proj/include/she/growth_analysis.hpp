#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "she/errors.hpp"
#include "she/initial_data.hpp"
#include "she/moment_calculus.hpp"
#include "she/moment_kernels.hpp"
#include "she/special_functions.hpp"

namespace she {

// Upper Lyapunov exponent bound of order p for Lebesgue data.
inline double lyapunov_bound_lebesgue(int p, double Lip, double nu, bool vip_zero) {
    if (p < 2 || p % 2 != 0) throw InvalidArgument("lyapunov_bound_lebesgue: p must be an even integer >= 2");
    if (!(nu > 0.0)) throw InvalidArgument("lyapunov_bound_lebesgue: nu must be > 0");
    const double p3 = static_cast<double>(p) * p * p, l4 = std::pow(Lip, 4);
    return (vip_zero ? 8.0 : 32.0) * p3 * l4 / nu;
}

// Exact moment Lyapunov exponent of the parabolic Anderson model: lambda^4 n (n^2 - 1) / (4! nu).
inline double lyapunov_exact_pam(int n, double lambda, double nu) {
    if (n < 1) throw InvalidArgument("lyapunov_exact_pam: n must be >= 1");
    if (!(nu > 0.0)) throw InvalidArgument("lyapunov_exact_pam: nu must be > 0");
    const double dn = n;
    return std::pow(lambda, 4) * dn * (dn * dn - 1.0) / (24.0 * nu);
}

// Smallest even integer >= p.
inline int ceil_even(double p) {
    const int c = static_cast<int>(std::ceil(p));
    return c % 2 == 0 ? c : c + 1;
}

struct GrowthIndexBounds {
    double lower = -kInf;  // -inf: no lower bound available
    double upper = kInf;
    std::string note;
};

// Bounds on the exponential growth indices of order p from the exponential tail rate beta of mu.
inline GrowthIndexBounds growth_index_bounds(double p, const GrowthEnvelope& env, double beta, double nu, bool mu_nonnegative_nonzero = true) {
    if (!(p >= 2.0)) throw InvalidArgument("growth_index_bounds: p must be >= 2");
    if (!(nu > 0.0)) throw InvalidArgument("growth_index_bounds: nu must be > 0");
    if (!(beta >= 0.0)) throw InvalidArgument("growth_index_bounds: beta must be >= 0");
    env.validate();
    GrowthIndexBounds b;
    if (env.vip_low != 0.0) {
        b.lower = b.upper = kInf;
        b.note = "lower offset nonzero: both indices are infinite";
        return b;
    }
    if (mu_nonnegative_nonzero) b.lower = env.lip_low * env.lip_low / 2.0;
    if (env.Vip_up != 0.0) {
        b.upper = kInf;
        b.note = "no finite upper bound with a nonzero upper offset";
        return b;
    }
    const int pe = ceil_even(p);
    const double L2 = env.Lip_up * env.Lip_up;
    if (L2 == 0.0) {
        b.upper = 0.0;
    } else if (pe == 2) {
        // p = 2: threshold Lip^2/(2nu)
        b.upper = beta < L2 / (2.0 * nu) ? beta * nu / 2.0 + L2 * L2 / (8.0 * nu * beta) : L2 / 2.0;
    } else {
        const double z = BdgConstants::z(pe), z2L2 = z * z * L2;
        b.upper = beta < z2L2 / nu ? beta * nu / 2.0 + z2L2 * z2L2 / (2.0 * nu * beta) : z2L2;
    }
    return b;
}

// Exact p = 2 growth index for mu(dx) = e^{-beta|x|} dx.
inline double growth_index_exact_exp_decay(double beta, double lambda, double nu) {
    if (!(beta > 0.0)) throw InvalidArgument("growth_index_exact_exp_decay: beta must be > 0");
    if (!(nu > 0.0)) throw InvalidArgument("growth_index_exact_exp_decay: nu must be > 0");
    const double l2 = lambda * lambda;
    return beta <= l2 / (2.0 * nu) ? beta * nu / 2.0 + l2 * l2 / (8.0 * beta * nu) : l2 / 2.0;
}

struct AlphaRate {
    double alpha = 0.0;
    double rate = 0.0;      // fitted slope of t -> sup_{|x| >= alpha t} log E[u^2]
    double residual = 0.0;  // RMS residual of that fit
};

struct GrowthReport {
    int p = 2;
    double lower_index_bound = -kInf;
    double upper_index_bound = kInf;
    double empirical_transition = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    std::vector<AlphaRate> per_alpha;  // coarse grid and bisection points, sorted by alpha

    double bracket_width() const { return bracket_hi - bracket_lo; }
};

struct GrowthOptions {
    double t_max = 100.0;
    int fit_points = 5;        // equispaced on [t_max/2, t_max]
    int grid_points = 11;      // coarse alpha grid across the bracket
    double resolution = 0.01;  // final bracket width, in units of lambda^2
    int scan_points = 11;      // dense scan per ray before golden-section
};

namespace detail {

inline double log_second_moment(const InitialMeasure& mu, double nu, double lambda, double t, double x) {
    const double v = second_moment(mu, nu, lambda, 0.0, t, x).value;
    if (!(v > 0.0) || !std::isfinite(v)) throw DivergentMoment("growth index: second moment is not positive and finite");
    return std::log(v);
}

// max of f on [a, b]: dense scan, then golden-section inside the bracket of the best scan point.
template <class F>
double maximize_on(F&& f, double a, double b, int scan) {
    std::vector<double> xs(scan), fs(scan);
    for (int i = 0; i < scan; ++i) {
        xs[i] = a + (b - a) * i / (scan - 1);
        fs[i] = f(xs[i]);
    }
    const int best = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
    double lo = xs[std::max(best - 1, 0)], hi = xs[std::min(best + 1, scan - 1)];
    double top = fs[best];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 30 && hi - lo > 1e-9 * (1.0 + std::abs(hi)); ++it) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    return std::max({top, fc, fd});
}

inline AlphaRate alpha_rate(const InitialMeasure& mu, double nu, double lambda, double alpha, const GrowthOptions& opt) {
    const int n = std::max(opt.fit_points, 2);
    std::vector<double> ts(n), ls(n);
    for (int i = 0; i < n; ++i) {
        const double t = opt.t_max * (0.5 + 0.5 * i / (n - 1));
        const double lo = alpha * t, hi = lo + 10.0 * std::sqrt(nu * t);
        double best = maximize_on([&](double x) { return log_second_moment(mu, nu, lambda, t, x); }, lo, hi, opt.scan_points);
        if (!mu.is_symmetric())
            best = std::max(best, maximize_on([&](double x) { return log_second_moment(mu, nu, lambda, t, -x); }, lo, hi, opt.scan_points));
        ts[i] = t;
        ls[i] = best;
    }
    double mt = 0.0, ml = 0.0;
    for (int i = 0; i < n; ++i) {
        mt += ts[i] / n;
        ml += ls[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (ts[i] - mt) * (ts[i] - mt);
        sxy += (ts[i] - mt) * (ls[i] - ml);
    }
    AlphaRate r;
    r.alpha = alpha;
    r.rate = sxy / sxx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = ls[i] - (ml + r.rate * (ts[i] - mt));
        ss += e * e;
    }
    r.residual = std::sqrt(ss / n);
    return r;
}

}  // namespace detail

// Empirical p = 2 growth index: the alpha at which the fitted rate of sup_{|x| >= alpha t} log E[u^2] changes sign.
inline GrowthReport empirical_growth_index(const InitialMeasure& mu, double nu, double lambda, std::pair<double, double> alpha_bracket,
                                           const GrowthOptions& opt = {}) {
    if (mu.is_zero() || !mu.is_nonnegative()) throw InvalidArgument("empirical_growth_index: mu must be nonnegative and nonzero");
    if (!(nu > 0.0) || lambda == 0.0) throw InvalidArgument("empirical_growth_index: need nu > 0 and lambda != 0");
    auto [a, b] = alpha_bracket;
    if (!(a >= 0.0) || !(b > a)) throw InvalidArgument("empirical_growth_index: bracket must satisfy 0 <= lo < hi");
    if (opt.grid_points < 2 || !(opt.t_max > 0.0)) throw InvalidArgument("empirical_growth_index: bad options");
    const double l2 = lambda * lambda;

    GrowthReport rep;
    rep.p = 2;
    const auto bounds = growth_index_bounds(2.0, GrowthEnvelope::quasi_linear(lambda, 0.0), exp_tail_rate(mu), nu, true);
    rep.lower_index_bound = bounds.lower;
    rep.upper_index_bound = bounds.upper;

    for (int i = 0; i < opt.grid_points; ++i)
        rep.per_alpha.push_back(detail::alpha_rate(mu, nu, lambda, a + (b - a) * i / (opt.grid_points - 1), opt));
    if (!(rep.per_alpha.front().rate > 0.0) || !(rep.per_alpha.back().rate < 0.0))
        throw NoSignChange("empirical_growth_index: rate does not change sign on [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] (r(lo) = " + std::to_string(rep.per_alpha.front().rate) +
                           ", r(hi) = " + std::to_string(rep.per_alpha.back().rate) + ")");
    std::size_t k = 1;
    while (rep.per_alpha[k].rate > 0.0) ++k;
    double lo = rep.per_alpha[k - 1].alpha, hi = rep.per_alpha[k].alpha;
    while (hi - lo > opt.resolution * l2) {
        const double mid = 0.5 * (lo + hi);
        const AlphaRate r = detail::alpha_rate(mu, nu, lambda, mid, opt);
        rep.per_alpha.push_back(r);
        (r.rate > 0.0 ? lo : hi) = mid;
    }
    std::sort(rep.per_alpha.begin(), rep.per_alpha.end(), [](const AlphaRate& x, const AlphaRate& y) { return x.alpha < y.alpha; });
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    rep.empirical_transition = 0.5 * (lo + hi);
    return rep;
}

}  // namespace she
