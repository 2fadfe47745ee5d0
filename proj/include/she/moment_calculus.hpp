#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "she/detail/fft.hpp"
#include "she/errors.hpp"
#include "she/initial_data.hpp"
#include "she/moment_kernels.hpp"
#include "she/quadrature.hpp"
#include "she/special_functions.hpp"

namespace she {

enum class Evaluation { automatic, quadrature };

struct ConvolutionOptions {
    double inner_rel_tol = 1e-8;
    double outer_rel_tol = 1e-6;
};

struct MomentValue {
    double value = 0.0;
    std::string branch;
    bool tolerance_met = true;
};

// Values f(t_i, x_j) on a strictly increasing t-grid and a uniform x-grid, row-major in t.
struct GridFunction {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> values;

    std::size_t nt() const { return t.size(); }
    std::size_t nx() const { return x.size(); }
    double& at(std::size_t i, std::size_t j) { return values[i * x.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * x.size() + j]; }
    const double* row(std::size_t i) const { return values.data() + i * x.size(); }

    // bilinear interpolation, clamped to the grid
    double interpolate(double tq, double xq) const {
        if (t.empty() || x.empty()) throw InvalidArgument("GridFunction: empty grid");
        auto bracket = [](const std::vector<double>& g, double q, std::size_t& k, double& w) {
            if (g.size() == 1 || q <= g.front()) {
                k = 0;
                w = 0.0;
                return;
            }
            if (q >= g.back()) {
                k = g.size() - 2;
                w = 1.0;
                return;
            }
            k = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), q) - g.begin()) - 1;
            w = (q - g[k]) / (g[k + 1] - g[k]);
        };
        std::size_t i = 0, j = 0;
        double wt = 0.0, wx = 0.0;
        bracket(t, tq, i, wt);
        bracket(x, xq, j, wx);
        const std::size_t i1 = std::min(i + 1, nt() - 1), j1 = std::min(j + 1, nx() - 1);
        const double a = (1 - wx) * at(i, j) + wx * at(i, j1);
        const double b = (1 - wx) * at(i1, j) + wx * at(i1, j1);
        return (1 - wt) * a + wt * b;
    }
};

// ---------------------------------------------------------------- closed forms

// T(t,d) = int_0^t G_{2nu}(s,d) k(t-s) ds with k the time factor of K.
inline double atom_pair_time_integral(double nu, double lambda, double t, double d) {
    const double l2 = lambda * lambda, l4 = l2 * l2;
    const double c = l4 * t / (4.0 * nu);
    d = std::abs(d);
    if (d == 0.0) return l2 / (2.0 * nu) * std::exp(c) * std_normal_cdf(l2 * std::sqrt(t / (2.0 * nu)));
    // the (t-s)^{-1/2} part integrates to an erfc
    const double first = l2 / (4.0 * nu) * std::erfc(d / (2.0 * std::sqrt(nu * t)));
    auto smooth = [&](double s) {
        const double g = heat_kernel(2.0 * nu, s, d);
        if (g == 0.0) return 0.0;
        const double tau = t - s;
        return g * l4 / (2.0 * nu) * std::exp(l4 * tau / (4.0 * nu)) * std_normal_cdf(l2 * std::sqrt(tau / (2.0 * nu)));
    };
    const double peak = d * d / (2.0 * nu);
    std::vector<double> pts{0.0, t};
    for (double f : {0.05, 0.25, 1.0, 4.0})
        if (f * peak < t) pts.push_back(f * peak);
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-300;
    return first + integrate_breaks(smooth, pts, opt).value;
}

// E[u(t,x)u(t,y)] for Lebesgue data, |rho|^2 = lambda^2 (vv^2 + u^2).
inline double two_point_lebesgue(double nu, double lambda, double vv, double t, double x, double y) {
    if (!(t > 0.0)) throw InvalidArgument("two_point_lebesgue: t must be > 0");
    const double d = std::abs(x - y), l2 = lambda * lambda;
    const double s = 2.0 * std::sqrt(nu * t);
    const double a = (l2 * l2 * t - 2.0 * l2 * d) / (4.0 * nu);
    return 1.0 + (1.0 + vv * vv) * (exp_erfc(a, (d - l2 * t) / s) - std::erfc(d / s));
}

// E[u(t,x)u(t,y)] for delta_0 data.
inline double two_point_delta(double nu, double lambda, double vv, double t, double x, double y) {
    if (!(t > 0.0)) throw InvalidArgument("two_point_delta: t must be > 0");
    const double d = std::abs(x - y), l2 = lambda * lambda;
    const double s = 2.0 * std::sqrt(nu * t);
    const double a = (l2 * l2 * t - 2.0 * l2 * d) / (4.0 * nu);
    const double front = heat_kernel(nu, t, x) * heat_kernel(nu, t, y) - vv * vv * std::erfc(d / s);
    const double amp = l2 / (4.0 * nu) * heat_kernel(nu / 2.0, t, 0.5 * (x + y)) + vv * vv;
    if (amp == 0.0) return front;
    return front + amp * exp_erfc(a, (d - l2 * t) / s);
}

// Squared L2 norm of the stochastic term for delta_0 data.
inline double stochastic_term_delta_limit(double nu, double lambda, double t, double x) {
    if (!(t > 0.0)) throw InvalidArgument("stochastic_term_delta_limit: t must be > 0");
    const double g = heat_kernel(nu / 2.0, t, x);
    if (g == 0.0) return 0.0;
    return atom_pair_time_integral(nu, lambda, t, 0.0) * g;
}

// --------------------------------------------------------- Bertini-Cancrini forms

inline double bc_lebesgue_integral(double nu, double t, double x, double y) {
    if (!(t > 0.0)) throw InvalidArgument("bc_lebesgue_integral: t must be > 0");
    const double d = std::abs(x - y);
    if (d == 0.0) return 0.0;
    auto f = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double e = -d * d / (4.0 * nu * s) + (t - s) / (4.0 * nu);
        if (e < log_min_normal()) return 0.0;
        return d / std::sqrt(kPi * nu * s * s * s) * std::exp(e) * std_normal_cdf(std::sqrt((t - s) / (2.0 * nu)));
    };
    const double peak = d * d / (6.0 * nu);
    std::vector<double> pts{0.0, t};
    for (double k : {0.1, 0.3, 1.0, 3.0, 10.0})
        if (k * peak < t) pts.push_back(k * peak);
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-300;
    const QuadResult q = integrate_breaks(f, pts, opt);
    if (!q.converged) throw QuadratureFailure("bc_lebesgue_integral did not converge");
    return q.value;
}

inline double bc_delta_integral(double nu, double t, double x, double y) {
    if (!(t > 0.0)) throw InvalidArgument("bc_delta_integral: t must be > 0");
    const double d = std::abs(x - y);
    const double pre = std::exp(-(x * x + y * y) / (2.0 * nu * t)) / (2.0 * kPi * nu * t);
    if (d == 0.0 || pre == 0.0) return 0.0;
    const double q2 = d * d / (4.0 * nu * t);
    auto f = [&](double s) {
        if (s <= 0.0 || s >= 1.0) return 0.0;
        const double om = 1.0 - s;
        const double e = -q2 * om / s;
        if (e < log_min_normal()) return 0.0;
        const double bracket =
            1.0 + std::sqrt(kPi * t * om / nu) * std::exp(t / (2.0 * nu) * om / 2.0) * std_normal_cdf(std::sqrt(t * om / (2.0 * nu)));
        return d / std::sqrt(4.0 * kPi * nu * t) / std::sqrt(s * s * s * om) * std::exp(e) * bracket;
    };
    // the integrand peaks near s = 2 q2 / 3 for small separations
    std::vector<double> br;
    const double peak = 2.0 * q2 / 3.0;
    for (double k : {0.1, 0.3, 1.0, 3.0, 10.0})
        if (k * peak < 0.5) br.push_back(k * peak);
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-300;
    const QuadResult q = integrate_sqrt_ends(f, 0.0, 1.0, false, true, br, opt);
    if (!q.converged) throw QuadratureFailure("bc_delta_integral did not converge");
    return pre * q.value;
}

// Closed-form n-th moment of the parabolic Anderson model with Lebesgue data (lambda = 1).
inline double bc_moment_lebesgue(int n, double nu, double t) {
    if (n < 1) throw InvalidArgument("bc_moment_lebesgue: n must be >= 1");
    if (!(t > 0.0) || !(nu > 0.0)) throw InvalidArgument("bc_moment_lebesgue: need t > 0 and nu > 0");
    const double k = static_cast<double>(n) * (static_cast<double>(n) * n - 1.0);
    return 2.0 * std::exp(k * t / (24.0 * nu)) * std_normal_cdf(std::sqrt(k * t / (12.0 * nu)));
}

// ------------------------------------------------------------ convolution J0^2 * K

namespace detail {

inline double signed_total_weight_lebesgue(const InitialMeasure& mu) { return mu.densities()[0].weight; }

// int J0(s,y)^2 G_{nu/2}(tau, c - y) dy
inline double j0sq_gauss_inner(const InitialMeasure& mu, double nu, double s, double tau, double c, double rel_tol) {
    if (mu.is_lebesgue()) {
        const double w = signed_total_weight_lebesgue(mu);
        return w * w;
    }
    const double wt = std::sqrt(nu * tau / 2.0), ws = std::sqrt(nu * s);
    auto f = [&](double y) {
        const double g = heat_kernel(nu / 2.0, tau, c - y);
        if (g == 0.0) return 0.0;
        const double j = j0(mu, nu, s, y);
        return j * j * g;
    };
    std::vector<double> br{c, c - wt, c + wt, c - 4.0 * wt, c + 4.0 * wt};
    for (double b : mu.breakpoints()) {
        br.push_back(b);
        br.push_back(b - ws);
        br.push_back(b + ws);
        br.push_back(b - 4.0 * ws);
        br.push_back(b + 4.0 * ws);
    }
    QuadOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    const QuadResult q = integrate_line(f, br, wt + ws, opt);
    if (!std::isfinite(q.value)) throw DivergentMoment("inner space integral is not finite");
    return q.value;
}

inline bool has_atoms(const InitialMeasure& mu) { return !mu.atoms().empty(); }

}  // namespace detail

// (J0^2 * K)(t,x) with K built from (nu, lambda).
inline MomentValue j0_squared_star_K(const InitialMeasure& mu, double nu, double lambda, double t, double x,
                                     Evaluation eval = Evaluation::automatic, const ConvolutionOptions& co = {}) {
    if (!(t > 0.0)) throw InvalidArgument("J0^2 * K: t must be > 0");
    if (lambda == 0.0) return {0.0, "lambda=0", true};
    const KernelParams kp(nu, lambda);
    if (eval == Evaluation::automatic && mu.is_lebesgue()) {
        const double w = detail::signed_total_weight_lebesgue(mu);
        return {w * w * kernel_H(t, kp), "lebesgue-closed-form", true};
    }
    if (eval == Evaluation::automatic && mu.is_pure_atomic()) {
        const auto& at = mu.atoms();
        double sum = 0.0;
        for (std::size_t i = 0; i < at.size(); ++i)
            for (std::size_t j = i; j < at.size(); ++j) {
                const double g = heat_kernel(nu / 2.0, t, x - 0.5 * (at[i].location + at[j].location));
                if (g == 0.0) continue;
                const double mult = (i == j) ? 1.0 : 2.0;
                sum += mult * at[i].mass * at[j].mass * g * atom_pair_time_integral(nu, lambda, t, at[i].location - at[j].location);
            }
        return {sum, "atoms-closed-form", true};
    }
    if (!check_j0_finite(mu, nu, t, x)) throw DivergentMoment("J0 is not finite for this measure");
    bool inner_ok = true;
    auto outer = [&](double s) {
        const double tau = t - s;
        if (!(s > 0.0) || !(tau > 0.0)) return 0.0;
        return kernel_time_factor(tau, kp) * detail::j0sq_gauss_inner(mu, nu, s, tau, x, co.inner_rel_tol);
    };
    QuadOptions opt;
    opt.rel_tol = co.outer_rel_tol;
    opt.abs_tol = 1e-300;
    const QuadResult q = integrate_sqrt_ends(outer, 0.0, t, true, true, {}, opt);
    if (!std::isfinite(q.value)) throw DivergentMoment("space-time convolution is not finite");
    return {q.value, "quadrature", q.converged && inner_ok};
}

// J0^2 + J0^2 * K + vv^2 H with the given constants.
inline MomentValue second_moment(const InitialMeasure& mu, double nu, double lambda, double vv, double t, double x,
                                 Evaluation eval = Evaluation::automatic, const ConvolutionOptions& co = {}) {
    if (!(t > 0.0)) throw InvalidArgument("second moment: t must be > 0");
    const double j = j0(mu, nu, t, x);
    MomentValue conv = j0_squared_star_K(mu, nu, lambda, t, x, eval, co);
    const double h = lambda == 0.0 ? 0.0 : kernel_H(t, KernelParams(nu, lambda));
    conv.value += j * j + vv * vv * h;
    return conv;
}

// ------------------------------------------------------------------- requests

struct MomentRequest {
    InitialMeasure mu;
    GrowthEnvelope env;
    double nu = 1.0;
    int p = 2;
    double t = 1.0;
    double x = 0.0;

    void validate() const {
        if (!(nu > 0.0)) throw InvalidArgument("MomentRequest: nu must be > 0");
        if (p < 2 || p % 2 != 0) throw InvalidArgument("MomentRequest: p must be an even integer >= 2");
        if (!(t > 0.0)) throw InvalidArgument("MomentRequest: t must be > 0");
        env.validate();
        if (!check_j0_finite(mu, nu, t, x)) throw DivergentJ0("MomentRequest: initial data is not admissible at (t, x)");
    }
};

inline MomentValue second_moment_exact(const MomentRequest& req, Evaluation eval = Evaluation::automatic,
                                       const ConvolutionOptions& co = {}) {
    req.validate();
    if (!req.env.quasi) throw InvalidArgument("second_moment_exact needs a quasi-linear envelope");
    return second_moment(req.mu, req.nu, req.env.quasi->lambda, req.env.quasi->vv, req.t, req.x, eval, co);
}

inline MomentValue second_moment_lower(const MomentRequest& req, Evaluation eval = Evaluation::automatic,
                                       const ConvolutionOptions& co = {}) {
    req.validate();
    MomentValue v = second_moment(req.mu, req.nu, req.env.lip_low, req.env.vip_low, req.t, req.x, eval, co);
    v.branch = "lower/" + v.branch;
    return v;
}

struct PthMomentBound {
    double norm_sq_bound = 0.0;  // bound on ||u||_p^2
    double moment_bound = 0.0;   // bound on E|u|^p
    std::string branch;
    double a_p = 1.0;
    double z_p = 1.0;
    double lambda_eff = 0.0;
    bool tolerance_met = true;
};

inline PthMomentBound pth_moment_upper(const MomentRequest& req, Evaluation eval = Evaluation::automatic,
                                       const ConvolutionOptions& co = {}) {
    req.validate();
    PthMomentBound out;
    const BdgConstants b = BdgConstants::make(req.p, req.env.Vip_up != 0.0);
    out.a_p = b.a_p_vip;
    out.z_p = b.z_p;
    out.lambda_eff = variant_lambda(req.p == 2 ? KernelVariant::upper : KernelVariant::hat, req.env, req.p);
    const double j = j0(req.mu, req.nu, req.t, req.x);
    const MomentValue conv = j0_squared_star_K(req.mu, req.nu, out.lambda_eff, req.t, req.x, eval, co);
    const double h = out.lambda_eff == 0.0 ? 0.0 : kernel_H(req.t, KernelParams(req.nu, out.lambda_eff));
    const double v2 = req.env.Vip_up * req.env.Vip_up;
    if (req.p == 2) {
        out.norm_sq_bound = j * j + conv.value + v2 * h;
        out.branch = "p=2";
    } else {
        out.norm_sq_bound = 2.0 * j * j + 2.0 * conv.value + v2 * h;
        out.branch = "p>2";
    }
    out.moment_bound = std::pow(out.norm_sq_bound, req.p / 2.0);
    out.tolerance_met = conv.tolerance_met;
    return out;
}

// Displayed p-th moment bound for Lebesgue data, evaluated as printed.
inline double lebesgue_pth_moment_display(int p, double Lip, double vip, double nu, double t) {
    const BdgConstants b = BdgConstants::make(p, vip != 0.0);
    const double a2 = b.a_p_vip * b.a_p_vip, z2 = b.z_p * b.z_p, L2 = Lip * Lip;
    const double expo = a2 * a2 * z2 * z2 * p * L2 * L2 * t / (8.0 * nu);
    const double phi = std_normal_cdf(a2 * L2 * z2 * std::sqrt(t / (2.0 * nu)));
    return std::pow(2.0, p - 1.0) + std::pow(2.0, p / 2.0 - 1.0) * std::pow(2.0 + vip * vip, p / 2.0) * std::exp(expo) * std::pow(phi, p / 2.0);
}

struct DeltaMomentChain {
    double first = 0.0;   // 2^{p-1} G^p + 2^{(p-2)/2} |2 G^2 * Khat|^{p/2}
    double second = 0.0;  // with 2 G^2 * Khat replaced by Khat / (z Lip)^2
    double third = 0.0;   // explicit form of the second line
};

// Displayed chain of p-th moment bounds for delta_0 data with vv = 0.
inline DeltaMomentChain delta_pth_moment_chain(int p, double Lip, double nu, double t, double x) {
    if (p <= 2 || p % 2 != 0) throw InvalidArgument("delta moment chain: p must be an even integer > 2");
    const double z = BdgConstants::z(p);
    const double lhat = kSqrt2 * z * Lip;
    const KernelParams kp(nu, lhat);
    const double khat = kernel_K(t, x, kp);
    const double g = heat_kernel(nu, t, x);
    const double gsq_star = atom_pair_time_integral(nu, lhat, t, 0.0) * heat_kernel(nu / 2.0, t, x);
    DeltaMomentChain c;
    const double lead = std::pow(2.0, p - 1.0) * std::pow(g, p);
    c.first = lead + std::pow(2.0, (p - 2.0) / 2.0) * std::pow(2.0 * gsq_star, p / 2.0);
    c.second = lead + std::pow(2.0, (p - 2.0) / 2.0) * std::pow(Lip * z, -p) * std::pow(khat, p / 2.0);
    const double z2L2 = z * z * Lip * Lip;
    const double inner = 1.0 / std::sqrt(4.0 * kPi * nu * t) +
                         z2L2 / nu * std::exp(z2L2 * z2L2 * t / nu) * std_normal_cdf(z2L2 * std::sqrt(2.0 * t / nu));
    c.third = lead + std::pow(2.0, p - 1.0) * std::pow(heat_kernel(nu / 2.0, t, x), p / 2.0) * std::pow(inner, p / 2.0);
    return c;
}

// ------------------------------------------------------------- two-point function

struct TwoPointOptions {
    std::size_t cache_nt = 200;
    std::size_t cache_nx = 400;
    ConvolutionOptions conv;
};

namespace detail {

// int P(z) phi_sigma(z - m) dz for the piecewise-linear interpolant P of row on a uniform grid,
// extended by constants outside.
inline double pl_gauss_integral(const double* row, double x0, double dx, std::size_t nx, double m, double sigma) {
    const double xl = x0 + dx * static_cast<double>(nx - 1);
    if (!(sigma > 0.0)) {
        if (m <= x0) return row[0];
        if (m >= xl) return row[nx - 1];
        const double u = (m - x0) / dx;
        const std::size_t j = std::min(static_cast<std::size_t>(u), nx - 2);
        const double w = u - static_cast<double>(j);
        return (1 - w) * row[j] + w * row[j + 1];
    }
    auto cdf = [&](double z) { return std_normal_cdf((z - m) / sigma); };
    auto ccdf = [&](double z) { return std_normal_cdf((m - z) / sigma); };
    auto pdf = [&](double z) {
        const double u = (z - m) / sigma;
        return std::exp(-0.5 * u * u) * kInvSqrtPi / kSqrt2;
    };
    double sum = row[0] * cdf(x0) + row[nx - 1] * ccdf(xl);
    const double lo = m - 12.0 * sigma, hi = m + 12.0 * sigma;
    long j0i = static_cast<long>(std::floor((lo - x0) / dx));
    long j1i = static_cast<long>(std::ceil((hi - x0) / dx));
    j0i = std::max(0L, j0i);
    j1i = std::min(static_cast<long>(nx) - 1, j1i);
    for (long j = j0i; j < j1i; ++j) {
        const double a = x0 + dx * static_cast<double>(j), b = a + dx;
        const double dphi = (a >= m) ? ccdf(a) - ccdf(b) : cdf(b) - cdf(a);
        const double m1 = (m - a) * dphi + sigma * (pdf(a) - pdf(b));
        sum += row[j] * dphi + (row[j + 1] - row[j]) / dx * m1;
    }
    return sum;
}

// Whole rows of int_0^t w(t-s) (J0(s,.)^2 * G_{nu/2}(t-s))(x_j) ds on a uniform x-grid:
// J0(s,.)^2 sampled on a refined padded grid, Gaussian smoothing by FFT, s-integral by fixed Gauss rules
// after s = t u^2/2 and s = t - t u^2/2, which absorb the endpoint behaviour.
class SquareSmoother {
public:
    SquareSmoother(double x0, double dx, std::size_t nx, double nu, double tmax, std::size_t refine = 2)
        : nx_(nx), refine_(refine), nu_(nu) {
        if (nx < 2 || !(dx > 0.0) || refine == 0) throw InvalidArgument("SquareSmoother: bad grid");
        dy_ = dx / static_cast<double>(refine);
        // margin wide enough that circular wrap never reaches the output window
        margin_ = static_cast<std::size_t>(std::ceil(12.0 * std::sqrt(nu * tmax / 2.0) / dy_)) + 4;
        const std::size_t n = (nx - 1) * refine + 1 + 2 * margin_;
        y0_ = x0 - static_cast<double>(margin_) * dy_;
        buf_.assign(n, 0.0);
        fft_ = std::make_unique<RealFft>(n);
    }

    template <class J0, class W>
    std::vector<double> row(J0&& j0s, double t, W&& weight) {
        std::vector<double> acc(nx_, 0.0);
        const std::size_t n = buf_.size();
        for (int half = 0; half < 2; ++half)
            for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
                const double u = rule_.nodes[q];
                const double s = half == 0 ? 0.5 * t * u * u : t - 0.5 * t * u * u;
                const double tau = t - s;
                if (!(s > 0.0) || !(tau > 0.0)) continue;
                const double w = rule_.weights[q] * t * u * weight(tau);
                for (std::size_t m = 0; m < n; ++m) {
                    const double v = j0s(s, y0_ + dy_ * static_cast<double>(m));
                    buf_[m] = v * v;
                }
                fft_->gaussian_smooth(buf_, dy_, std::sqrt(nu_ * tau / 2.0));
                for (std::size_t j = 0; j < nx_; ++j) acc[j] += w * buf_[margin_ + j * refine_];
            }
        return acc;
    }

private:
    std::size_t nx_, refine_, margin_ = 0;
    double nu_, dy_ = 0.0, y0_ = 0.0;
    std::vector<double> buf_;
    FixedRule rule_ = gauss_legendre01(24);
    std::unique_ptr<RealFft> fft_;
};

// R = f - J0^2 on the cache grid; the J0^2 part is handled exactly elsewhere.
inline GridFunction remainder_cache(const InitialMeasure& mu, double nu, double lambda, double vv, double t, double center,
                                    const TwoPointOptions& opt) {
    GridFunction g;
    const std::size_t K = std::max<std::size_t>(opt.cache_nt, 2), N = std::max<std::size_t>(opt.cache_nx, 2);
    const double half = 8.0 * std::sqrt(nu * t) + 1e-12;
    for (std::size_t k = 1; k <= K; ++k) {
        const double r = static_cast<double>(k) / static_cast<double>(K);
        g.t.push_back(t * r * r);
    }
    for (std::size_t j = 0; j < N; ++j) g.x.push_back(center - half + 2.0 * half * static_cast<double>(j) / static_cast<double>(N - 1));
    g.values.assign(K * N, 0.0);
    const KernelParams kp(nu, lambda);
    std::optional<SquareSmoother> fast;
    if (!mu.is_lebesgue() && !mu.is_pure_atomic() && !has_atoms(mu)) fast.emplace(g.x.front(), g.x[1] - g.x[0], N, nu, t);
    for (std::size_t i = 0; i < K; ++i) {
        const double ti = g.t[i];
        const double hv = vv * vv * kernel_H(ti, kp);
        if (mu.is_lebesgue()) {
            const double w = signed_total_weight_lebesgue(mu);
            for (std::size_t j = 0; j < N; ++j) g.at(i, j) = w * w * kernel_H(ti, kp) + hv;
            continue;
        }
        if (mu.is_pure_atomic()) {
            const auto& at = mu.atoms();
            std::vector<double> tij;
            for (std::size_t a = 0; a < at.size(); ++a)
                for (std::size_t b = a; b < at.size(); ++b)
                    tij.push_back((a == b ? 1.0 : 2.0) * at[a].mass * at[b].mass *
                                  atom_pair_time_integral(nu, lambda, ti, at[a].location - at[b].location));
            for (std::size_t j = 0; j < N; ++j) {
                double s = 0.0;
                std::size_t idx = 0;
                for (std::size_t a = 0; a < at.size(); ++a)
                    for (std::size_t b = a; b < at.size(); ++b, ++idx)
                        s += tij[idx] * heat_kernel(nu / 2.0, ti, g.x[j] - 0.5 * (at[a].location + at[b].location));
                g.at(i, j) = s + hv;
            }
            continue;
        }
        if (fast) {
            const auto r = fast->row([&](double s, double y) { return j0(mu, nu, s, y); }, ti,
                                     [&](double tau) { return kernel_time_factor(tau, kp); });
            for (std::size_t j = 0; j < N; ++j) g.at(i, j) = r[j] + hv;
            continue;
        }
        for (std::size_t j = 0; j < N; ++j)
            g.at(i, j) = j0_squared_star_K(mu, nu, lambda, ti, g.x[j], Evaluation::automatic, opt.conv).value + hv;
    }
    return g;
}

}  // namespace detail

// E[u(t,x)u(t,y)] through the two-point representation with (lambda, vv).
inline double two_point_quasi(const InitialMeasure& mu, double nu, double lambda, double vv, double t, double x, double y,
                              const TwoPointOptions& opt = {}) {
    if (!(t > 0.0)) throw InvalidArgument("two-point: t must be > 0");
    const double jx = j0(mu, nu, t, x), jy = j0(mu, nu, t, y);
    if (lambda == 0.0) return jx * jy;
    const double d = std::abs(x - y), m = 0.5 * (x + y), l2 = lambda * lambda;
    const GridFunction cache = detail::remainder_cache(mu, nu, lambda, vv, t, m, opt);
    const double x0 = cache.x.front(), dx = cache.x[1] - cache.x[0];
    const std::size_t nx = cache.nx();
    auto remainder_part = [&](double s, double sigma) {
        const auto& tg = cache.t;
        if (s <= tg.front()) return s / tg.front() * detail::pl_gauss_integral(cache.row(0), x0, dx, nx, m, sigma);
        std::size_t k = static_cast<std::size_t>(std::upper_bound(tg.begin(), tg.end(), s) - tg.begin());
        if (k >= tg.size()) return detail::pl_gauss_integral(cache.row(tg.size() - 1), x0, dx, nx, m, sigma);
        const double w = (s - tg[k - 1]) / (tg[k] - tg[k - 1]);
        return (1 - w) * detail::pl_gauss_integral(cache.row(k - 1), x0, dx, nx, m, sigma) +
               w * detail::pl_gauss_integral(cache.row(k), x0, dx, nx, m, sigma);
    };
    auto outer = [&](double s) {
        const double tau = t - s;
        if (!(s > 0.0) || !(tau > 0.0)) return 0.0;
        const double g = heat_kernel(2.0 * nu, tau, d);
        if (g == 0.0) return 0.0;
        const double sigma = std::sqrt(nu * tau / 2.0);
        return g * (detail::j0sq_gauss_inner(mu, nu, s, tau, m, opt.conv.inner_rel_tol) + remainder_part(s, sigma));
    };
    QuadOptions qo;
    qo.rel_tol = opt.conv.outer_rel_tol;
    qo.abs_tol = 1e-300;
    const QuadResult q = integrate_sqrt_ends(outer, 0.0, t, true, true, {}, qo);
    if (!std::isfinite(q.value)) throw DivergentMoment("two-point integral is not finite");
    const double v2 = vv * vv;
    const double noise_floor = l2 * v2 / nu * d * (std_normal_cdf(d / std::sqrt(2.0 * nu * t)) - 1.0) +
                               2.0 * l2 * v2 * t * heat_kernel(2.0 * nu, t, d);
    return jx * jy + l2 * q.value + noise_floor;
}

inline double two_point_general(const MomentRequest& req, double y, const TwoPointOptions& opt = {}) {
    req.validate();
    if (!req.env.quasi) throw InvalidArgument("two_point_general needs a quasi-linear envelope");
    return two_point_quasi(req.mu, req.nu, req.env.quasi->lambda, req.env.quasi->vv, req.t, req.x, y, opt);
}

// (lower, upper) two-point bounds built from the lower and upper envelope constants.
inline std::pair<double, double> two_point_bounds(const MomentRequest& req, double y, const TwoPointOptions& opt = {}) {
    req.validate();
    const double lo = two_point_quasi(req.mu, req.nu, req.env.lip_low, req.env.vip_low, req.t, req.x, y, opt);
    const double hi = two_point_quasi(req.mu, req.nu, req.env.Lip_up, req.env.Vip_up, req.t, req.x, y, opt);
    return {lo, hi};
}

}  // namespace she
