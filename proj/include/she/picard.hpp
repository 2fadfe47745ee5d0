#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "she/detail/fft.hpp"
#include "she/errors.hpp"
#include "she/initial_data.hpp"
#include "she/moment_calculus.hpp"
#include "she/quadrature.hpp"
#include "she/special_functions.hpp"

namespace she {

// Space-time grid of the Picard solver: t_k = T (k/K)^2 for k = 1..K, x_j = -L + 2Lj/N (periodic).
struct PicardGrid {
    double T = 0.5;
    double L = 5.0;
    std::size_t nt = 200;
    std::size_t nx = 400;

    void validate() const {
        if (!(T > 0.0) || !(L > 0.0)) throw InvalidArgument("PicardGrid: T and L must be > 0");
        if (nt < 2 || nx < 4 || nx % 2 != 0) throw InvalidArgument("PicardGrid: need nt >= 2 and an even nx >= 4");
    }
    double t(std::size_t k) const {
        const double r = static_cast<double>(k) / static_cast<double>(nt);
        return T * r * r;
    }
    double dx() const { return 2.0 * L / static_cast<double>(nx); }
    double x(std::size_t j) const { return -L + dx() * static_cast<double>(j); }

    GridFunction empty() const {
        GridFunction g;
        for (std::size_t k = 1; k <= nt; ++k) g.t.push_back(t(k));
        for (std::size_t j = 0; j < nx; ++j) g.x.push_back(x(j));
        g.values.assign(nt * nx, 0.0);
        return g;
    }
};

struct PicardOptions {
    double tolerance = 1e-6;  // sup-norm change between iterates
    int max_iterations = 50;
    double blowup = 1e9;  // arbitrary; a sup above it is reported as divergence
};

enum class PicardStatus { converged, diverged, iteration_limit };

inline std::string to_string(PicardStatus s) {
    switch (s) {
        case PicardStatus::converged:
            return "Converged";
        case PicardStatus::diverged:
            return "Diverged";
        case PicardStatus::iteration_limit:
            return "IterationLimit";
    }
    return "?";
}

struct PicardResult {
    PicardStatus status = PicardStatus::iteration_limit;
    int iterations = 0;                // n of the last iterate f_n
    std::vector<GridFunction> iterates;  // f_0, f_1, ..., f_n
    std::vector<double> sup_changes;   // sup |f_n - f_{n-1}|, n >= 1
    std::string reason;

    const GridFunction& last() const { return iterates.back(); }
    std::string status_label() const { return to_string(status) + "(" + std::to_string(iterations) + ")"; }
};

namespace detail {

using cplx = std::complex<double>;

// Spectral state of one Picard run: the source S = lambda^2 (vv^2 + J0^2) * G^2 and the exact
// product-integration weights of the G^2 time kernel per Fourier mode.
class PicardOperator {
public:
    PicardOperator(const PicardGrid& g, double nu, double lambda) : g_(g), nu_(nu), l2_(lambda * lambda), fft_(g.nx) {
        const std::size_t K = g.nt, M = g.nx / 2 + 1;
        xi_.resize(M);
        for (std::size_t k = 0; k < M; ++k) xi_[k] = kPi * static_cast<double>(k) / g.L;
        tk_.resize(K + 1);
        for (std::size_t k = 0; k <= K; ++k) tk_[k] = g.t(k);
        // Q(a) = int_0^a (4 pi nu tau)^{-1/2} e^{-c tau} d tau, c = nu xi^2 / 4, tabulated at a = t_k - t_m
        q_.assign((K + 1) * (K + 2) / 2 * M, 0.0);
        const double norm = 1.0 / std::sqrt(4.0 * kPi * nu);
        for (std::size_t k = 0; k <= K; ++k)
            for (std::size_t m = 0; m <= k; ++m) {
                const double a = tk_[k] - tk_[m];
                double* row = q_.data() + index(k, m) * M;
                for (std::size_t i = 0; i < M; ++i) {
                    const double c = nu * xi_[i] * xi_[i] / 4.0;
                    row[i] = norm * (c == 0.0 ? 2.0 * std::sqrt(a) : std::sqrt(kPi / c) * std::erf(std::sqrt(c * a)));
                }
            }
    }

    std::size_t modes() const { return xi_.size(); }
    double xi(std::size_t i) const { return xi_[i]; }

    std::vector<cplx> forward(const double* f) {
        std::copy(f, f + g_.nx, fft_.real());
        fft_.forward();
        std::vector<cplx> out(modes());
        for (std::size_t i = 0; i < modes(); ++i) out[i] = {fft_.spectrum()[i][0], fft_.spectrum()[i][1]};
        return out;
    }
    void backward(const std::vector<cplx>& spec, double* f) {
        for (std::size_t i = 0; i < modes(); ++i) {
            fft_.spectrum()[i][0] = spec[i].real();
            fft_.spectrum()[i][1] = spec[i].imag();
        }
        fft_.backward();
        const double inv = 1.0 / static_cast<double>(g_.nx);
        for (std::size_t j = 0; j < g_.nx; ++j) f[j] = fft_.real()[j] * inv;
    }

    // One sweep: out(t_k) = S(t_k) + lambda^2 int_0^{t_k} (in(s) * G^2(t_k - s)) ds, all in Fourier space.
    // On [t_{m-1}, t_m] the iterate is replaced by the endpoint average (the right value on the first piece).
    void apply(const std::vector<std::vector<cplx>>& src, const std::vector<std::vector<cplx>>& in,
               std::vector<std::vector<cplx>>& out) const {
        const std::size_t K = g_.nt, M = modes();
        out.assign(K, std::vector<cplx>(M));
        std::vector<cplx> acc(M);
        for (std::size_t k = 1; k <= K; ++k) {
            std::fill(acc.begin(), acc.end(), cplx{});
            for (std::size_t m = 1; m <= k; ++m) {
                const double* qa = q_.data() + index(k, m - 1) * M;
                const double* qb = q_.data() + index(k, m) * M;
                const auto& hi = in[m - 1];
                const auto* lo = m >= 2 ? &in[m - 2] : nullptr;
                for (std::size_t i = 0; i < M; ++i) {
                    const double w = qa[i] - qb[i];
                    const cplx v = lo ? 0.5 * ((*lo)[i] + hi[i]) : hi[i];
                    acc[i] += w * v;
                }
            }
            for (std::size_t i = 0; i < M; ++i) out[k - 1][i] = src[k - 1][i] + l2_ * acc[i];
        }
    }

private:
    std::size_t index(std::size_t k, std::size_t m) const { return k * (k + 1) / 2 + m; }

    PicardGrid g_;
    double nu_, l2_;
    RealFft fft_;
    std::vector<double> xi_, tk_, q_;
};

// Fourier coefficients (DFT convention, grid starting at -L) of S for atoms, from the closed time integral
// int_0^t G_{2nu}(s,d) (4 pi nu (t-s))^{-1/2} ds = erfc(|d| / (2 sqrt(nu t))) / (4 nu).
inline std::vector<cplx> atom_source_spectrum(const std::vector<Atom>& atoms, const PicardGrid& g, double nu, double l2, double t,
                                              std::size_t modes) {
    std::vector<cplx> out(modes);
    const double dx = g.dx();
    for (std::size_t i = 0; i < modes; ++i) {
        const double xi = kPi * static_cast<double>(i) / g.L;
        const double damp = std::exp(-nu * t * xi * xi / 4.0);
        cplx sum{};
        for (std::size_t a = 0; a < atoms.size(); ++a)
            for (std::size_t b = 0; b < atoms.size(); ++b) {
                const double d = std::abs(atoms[a].location - atoms[b].location);
                const double c = 0.5 * (atoms[a].location + atoms[b].location);
                const double amp = atoms[a].mass * atoms[b].mass * std::erfc(d / (2.0 * std::sqrt(nu * t))) / (4.0 * nu);
                sum += amp * std::polar(1.0, -xi * c);
            }
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        out[i] = l2 * damp * sign / dx * sum;
    }
    return out;
}

template <class J0>
PicardResult picard_run(const PicardGrid& grid, double nu, double lambda, const PicardOptions& opt, J0&& j0_at,
                        const std::vector<std::vector<cplx>>& src) {
    const std::size_t K = grid.nt, N = grid.nx;
    PicardOperator op(grid, nu, lambda);
    PicardResult res;
    GridFunction j0sq = grid.empty();
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < N; ++j) {
            const double v = j0_at(j0sq.t[k], j0sq.x[j]);
            j0sq.at(k, j) = v * v;
        }
    res.iterates.push_back(j0sq);
    std::vector<std::vector<cplx>> g_spec(K, std::vector<cplx>(op.modes())), next;
    std::vector<double> phys(N);
    for (int n = 1; n <= opt.max_iterations; ++n) {
        op.apply(src, g_spec, next);
        g_spec.swap(next);
        GridFunction f = j0sq;
        double change = 0.0, sup = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            op.backward(g_spec[k], phys.data());
            for (std::size_t j = 0; j < N; ++j) {
                f.at(k, j) += phys[j];
                change = std::max(change, std::abs(f.at(k, j) - res.iterates.back().at(k, j)));
                sup = std::max(sup, std::abs(f.at(k, j)));
            }
        }
        res.iterates.push_back(std::move(f));
        res.sup_changes.push_back(change);
        res.iterations = n;
        if (!std::isfinite(sup) || sup > opt.blowup) {
            res.status = PicardStatus::diverged;
            res.reason = "sup of the iterate exceeds the blow-up threshold";
            return res;
        }
        if (change < opt.tolerance) {
            res.status = PicardStatus::converged;
            return res;
        }
    }
    res.status = PicardStatus::iteration_limit;
    res.reason = "no convergence within the iteration cap";
    return res;
}

}  // namespace detail

// Picard iterates f_0 = J0^2, f_{n+1} = J0^2 + lambda^2 ((vv^2 + f_n) * G_nu^2) of the second moment.
// Spectral in space on the periodic grid, product integration in time.
inline PicardResult picard_second_moment(const InitialMeasure& mu, double nu, double lambda, double vv, const PicardGrid& grid = {},
                                         const PicardOptions& opt = {}) {
    grid.validate();
    if (!(nu > 0.0)) throw InvalidArgument("picard: nu must be > 0");
    if (!mu.atoms().empty() && !mu.densities().empty())
        throw InvalidArgument("picard: measures mixing atoms and densities are not supported");
    const double l2 = lambda * lambda;
    const std::size_t K = grid.nt, N = grid.nx;
    std::vector<std::vector<detail::cplx>> src(K);
    const std::size_t modes = N / 2 + 1;
    if (mu.is_zero() || mu.is_lebesgue() || mu.is_pure_atomic()) {
        const double w2 = mu.is_lebesgue() ? mu.densities()[0].weight * mu.densities()[0].weight : 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double t = grid.t(k + 1);
            src[k] = detail::atom_source_spectrum(mu.atoms(), grid, nu, l2, t, modes);
            src[k][0] += static_cast<double>(N) * l2 * (w2 + vv * vv) * std::sqrt(t / (kPi * nu));
        }
    } else {
        detail::SquareSmoother sm(grid.x(0), grid.dx(), N, nu, grid.T);
        detail::RealFft fft(N);
        std::vector<double> row(N);
        const double norm = 1.0 / std::sqrt(4.0 * kPi * nu);
        for (std::size_t k = 0; k < K; ++k) {
            const double t = grid.t(k + 1);
            const auto r = sm.row([&](double s, double y) { return j0(mu, nu, s, y); }, t,
                                  [&](double tau) { return norm / std::sqrt(tau); });
            for (std::size_t j = 0; j < N; ++j) fft.real()[j] = l2 * (r[j] + vv * vv * std::sqrt(t / (kPi * nu)));
            fft.forward();
            src[k].resize(modes);
            for (std::size_t i = 0; i < modes; ++i) src[k][i] = {fft.spectrum()[i][0], fft.spectrum()[i][1]};
        }
    }
    return detail::picard_run(grid, nu, lambda, opt, [&](double t, double x) { return j0(mu, nu, t, x); }, src);
}

// Distributional input mass * delta^(order)_a. Order 0 is an atom. For order >= 1 the first iterate
// already contains int_0 (d^order G(s))^2 ds, which is checked numerically for divergence.
inline PicardResult picard_second_moment(const DistributionalInput& in, double nu, double lambda, double vv, const PicardGrid& grid = {},
                                         const PicardOptions& opt = {}) {
    grid.validate();
    if (in.order == 0) return picard_second_moment(InitialMeasure::dirac(in.location, in.mass), nu, lambda, vv, grid, opt);
    const double t = grid.T, x = in.location;
    // s -> (J0(s)^2 * G_nu^2(t - s))(x)
    auto integrand = [&](double s) {
        const double tau = t - s;
        if (!(s > 0.0) || !(tau > 0.0)) return 0.0;
        auto inner = [&](double y) {
            const double j = j0_distributional(in, nu, s, y);
            const double g = heat_kernel(nu, tau, x - y);
            return j * j * g * g;
        };
        const double w = std::sqrt(nu * s);
        QuadOptions qo;
        qo.rel_tol = 1e-10;
        qo.abs_tol = 1e-300;
        return integrate_line(inner, {in.location - w, in.location, in.location + w}, w, qo).value;
    };
    const TailIntegral tail = integrate_toward_zero(integrand, 0.5 * t);
    PicardResult res;
    GridFunction f0 = grid.empty();
    for (std::size_t k = 0; k < grid.nt; ++k)
        for (std::size_t j = 0; j < grid.nx; ++j) {
            const double v = j0_distributional(in, nu, f0.t[k], f0.x[j]);
            f0.at(k, j) = v * v;
        }
    res.iterates.push_back(std::move(f0));
    if (!tail.divergent)
        throw QuadratureFailure("picard: the first iterate for a derivative of delta did not register as divergent");
    res.status = PicardStatus::diverged;
    res.iterations = 1;
    res.reason = "the first iterate is infinite: the time integral near s = 0 diverges";
    (void)opt;
    return res;
}

// Layerwise relative sup-norm distance: max over layers k >= first_layer of sup_j |f - ref| / sup_j |ref|.
template <class Ref>
double layer_relative_distance(const GridFunction& f, Ref&& ref, std::size_t first_layer = 0) {
    double worst = 0.0;
    for (std::size_t k = first_layer; k < f.nt(); ++k) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < f.nx(); ++j) {
            const double r = ref(f.t[k], f.x[j]);
            num = std::max(num, std::abs(f.at(k, j) - r));
            den = std::max(den, std::abs(r));
        }
        worst = std::max(worst, den > 0.0 ? num / den : num);
    }
    return worst;
}

template <class Ref>
double sup_distance(const GridFunction& f, Ref&& ref, std::size_t first_layer = 0) {
    double worst = 0.0;
    for (std::size_t k = first_layer; k < f.nt(); ++k)
        for (std::size_t j = 0; j < f.nx(); ++j) worst = std::max(worst, std::abs(f.at(k, j) - ref(f.t[k], f.x[j])));
    return worst;
}

}  // namespace she
