#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "she/detail/fft.hpp"
#include "she/errors.hpp"
#include "she/initial_data.hpp"
#include "she/rng.hpp"
#include "she/special_functions.hpp"

namespace she {

enum class Scheme { exponential_mild, explicit_fd };
enum class Boundary { dirichlet_zero, periodic };

inline std::string to_string(Scheme s) { return s == Scheme::exponential_mild ? "exponential_mild" : "explicit_fd"; }
inline std::string to_string(Boundary b) { return b == Boundary::dirichlet_zero ? "dirichlet_zero" : "periodic"; }

struct SimConfig {
    double L = 5.0;
    double dx = 0.05;
    double dt = 0.05 * 0.05 / 4.0;
    double T = 0.5;
    double nu = 1.0;
    std::size_t M = 100;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::exponential_mild;
    Boundary boundary = Boundary::dirichlet_zero;
    double x_query_max = 0.0;    // largest |x| that will be queried
    std::size_t save_every = 1;  // keep every k-th time row

    // number of cells on [-L, L]
    std::size_t cells() const { return static_cast<std::size_t>(std::llround(2.0 * L / dx)); }
    std::size_t steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }
    std::size_t nodes() const { return boundary == Boundary::periodic ? cells() : cells() + 1; }

    void validate() const {
        if (!(L > 0.0) || !(dx > 0.0) || !(dt > 0.0) || !(T > 0.0) || !(nu > 0.0)) throw ConfigError("SimConfig: L, dx, dt, T, nu must be > 0");
        const double c = 2.0 * L / dx;
        if (std::abs(c - std::round(c)) > 1e-9 * c || cells() < 4) throw ConfigError("SimConfig: 2L/dx must be an integer >= 4");
        const double s = T / dt;
        if (std::abs(s - std::round(s)) > 1e-9 * s || steps() < 1) throw ConfigError("SimConfig: T/dt must be a positive integer");
        if (M < 2) throw ConfigError("SimConfig: need M >= 2 replicates");
        if (save_every < 1) throw ConfigError("SimConfig: save_every must be >= 1");
        if (scheme == Scheme::explicit_fd && nu * dt / (dx * dx) > 0.5) throw ConfigError("SimConfig: explicit_fd needs nu dt / dx^2 <= 1/2");
        if (L < std::abs(x_query_max) + 6.0 * std::sqrt(nu * T)) throw ConfigError("SimConfig: need L >= x_query_max + 6 sqrt(nu T)");
        if (steps() > 0xffffffffull || M > 0xffffffffull) throw ConfigError("SimConfig: step or replicate count exceeds the RNG counter range");
    }
};

// Diffusion coefficient rho(u) of the noise term.
struct Rho {
    enum class Kind { zero, pam, quasi_linear, custom } kind = Kind::pam;
    double lambda = 1.0;
    double vv = 0.0;
    std::function<double(double)> custom;

    static Rho zero() { return Rho{Kind::zero, 0.0, 0.0, {}}; }
    static Rho pam(double lambda) { return Rho{Kind::pam, lambda, 0.0, {}}; }
    // |rho(u)|^2 = lambda^2 (vv^2 + u^2)
    static Rho quasi_linear(double lambda, double vv) { return Rho{Kind::quasi_linear, lambda, vv, {}}; }
    static Rho from_function(std::function<double(double)> f) { return Rho{Kind::custom, 0.0, 0.0, std::move(f)}; }

    double operator()(double u) const {
        switch (kind) {
            case Kind::zero:
                return 0.0;
            case Kind::pam:
                return lambda * u;
            case Kind::quasi_linear:
                return lambda * std::sqrt(vv * vv + u * u);
            case Kind::custom:
                return custom(u);
        }
        return 0.0;
    }
    bool is_zero() const { return kind == Kind::zero || (kind != Kind::custom && lambda == 0.0); }
    std::string describe() const {
        switch (kind) {
            case Kind::zero:
                return "zero";
            case Kind::pam:
                return "pam(lambda=" + std::to_string(lambda) + ")";
            case Kind::quasi_linear:
                return "quasi_linear(lambda=" + std::to_string(lambda) + ",vv=" + std::to_string(vv) + ")";
            case Kind::custom:
                return "custom";
        }
        return "?";
    }
};

// One replicate: rows n = 0, k, 2k, ... (k = save_every) of u(t_n, x_j), x_j = x0 + j dx.
struct LatticeField {
    std::uint64_t replicate = 0;
    std::size_t nx = 0;
    double x0 = 0.0, dx = 0.0, dt = 0.0, nu = 1.0;
    std::size_t stride = 1;
    std::vector<double> values;

    std::size_t rows() const { return nx == 0 ? 0 : values.size() / nx; }
    double t(std::size_t row) const { return static_cast<double>(row * stride) * dt; }
    double x(std::size_t j) const { return x0 + dx * static_cast<double>(j); }
    double at(std::size_t row, std::size_t j) const { return values[row * nx + j]; }
    const double* row(std::size_t r) const { return values.data() + r * nx; }

    std::size_t nearest_row(double tq) const {
        const double r = std::round(tq / (dt * static_cast<double>(stride)));
        if (r < 0.0 || r > static_cast<double>(rows() - 1)) throw InvalidArgument("LatticeField: time outside the saved rows");
        return static_cast<std::size_t>(r);
    }
    std::size_t nearest_node(double xq) const {
        const double r = std::round((xq - x0) / dx);
        if (r < 0.0 || r > static_cast<double>(nx - 1)) throw InvalidArgument("LatticeField: x outside the lattice");
        return static_cast<std::size_t>(r);
    }
};

namespace detail {

// Exact heat semigroup e^{dt (nu/2) Laplacian} on the lattice's Fourier (periodic) or sine (Dirichlet) modes.
class HeatPropagator {
public:
    explicit HeatPropagator(const SimConfig& c) : cfg_(c), n_(c.cells()) {
        if (c.boundary == Boundary::periodic) {
            fft_ = std::make_unique<RealFft>(n_);
            mult_.resize(fft_->spectrum_size());
            for (std::size_t k = 0; k < mult_.size(); ++k) {
                const double xi = kPi * static_cast<double>(k) / c.L;
                mult_[k] = std::exp(-0.5 * c.nu * c.dt * xi * xi) / static_cast<double>(n_);
            }
        } else {
            dst_ = std::make_unique<SineFft>(n_ - 1);
            mult_.resize(n_ - 1);
            for (std::size_t k = 0; k + 1 < n_; ++k) {
                const double kap = kPi * static_cast<double>(k + 1) / (2.0 * c.L);
                mult_[k] = std::exp(-0.5 * c.nu * c.dt * kap * kap) / (2.0 * static_cast<double>(n_));
            }
        }
    }

    void apply(std::vector<double>& u) {
        if (fft_) {
            // subtracting the mean keeps constants exact through the transform pair
            double mean = 0.0;
            for (double v : u) mean += v;
            mean /= static_cast<double>(n_);
            for (std::size_t j = 0; j < n_; ++j) fft_->real()[j] = u[j] - mean;
            fft_->forward();
            for (std::size_t k = 0; k < mult_.size(); ++k) {
                fft_->spectrum()[k][0] *= mult_[k];
                fft_->spectrum()[k][1] *= mult_[k];
            }
            fft_->backward();
            for (std::size_t j = 0; j < n_; ++j) u[j] = fft_->real()[j] + mean;
        } else {
            double* b = dst_->data();
            for (std::size_t j = 1; j < n_; ++j) b[j - 1] = u[j];
            dst_->execute();
            for (std::size_t k = 0; k + 1 < n_; ++k) b[k] *= mult_[k];
            dst_->execute();
            for (std::size_t j = 1; j < n_; ++j) u[j] = b[j - 1];
            u[0] = u[n_] = 0.0;
        }
    }

    // Atom of the given mass at a, smoothed for time dt in the lattice's own eigenbasis.
    void add_band_limited_atom(std::vector<double>& u, double a, double mass) {
        const SimConfig& c = cfg_;
        if (fft_) {
            const double dx = c.dx;
            for (std::size_t k = 0; k < mult_.size(); ++k) {
                const double xi = kPi * static_cast<double>(k) / c.L;
                const double amp = mass / dx * std::exp(-0.5 * c.nu * c.dt * xi * xi) * ((k % 2 == 0) ? 1.0 : -1.0);
                fft_->spectrum()[k][0] = amp * std::cos(xi * a);
                fft_->spectrum()[k][1] = -amp * std::sin(xi * a);
            }
            fft_->backward();
            for (std::size_t j = 0; j < n_; ++j) u[j] += fft_->real()[j] / static_cast<double>(n_);
        } else {
            double* b = dst_->data();
            for (std::size_t k = 0; k + 1 < n_; ++k) {
                const double kap = kPi * static_cast<double>(k + 1) / (2.0 * c.L);
                b[k] = mass / c.L * std::exp(-0.5 * c.nu * c.dt * kap * kap) * std::sin(kap * (a + c.L));
            }
            dst_->execute();
            for (std::size_t j = 1; j < n_; ++j) u[j] += 0.5 * b[j - 1];
        }
    }

private:
    SimConfig cfg_;
    std::size_t n_;
    std::unique_ptr<RealFft> fft_;
    std::unique_ptr<SineFft> dst_;
    std::vector<double> mult_;
};

// Row 0: densities sampled at the nodes, atoms as spikes mass/dx on the nearest node.
inline std::vector<double> rasterize(const InitialMeasure& mu, const SimConfig& c) {
    const std::size_t nodes = c.nodes();
    std::vector<double> u(nodes, 0.0);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double x = -c.L + c.dx * static_cast<double>(j);
        for (const auto& wd : mu.densities()) u[j] += wd.weight * wd.density.f(x);
    }
    for (const auto& a : mu.atoms()) {
        const double r = std::round((a.location + c.L) / c.dx);
        if (r < 0.0 || r > static_cast<double>(nodes - 1)) continue;
        u[static_cast<std::size_t>(r)] += a.mass / c.dx;
    }
    if (c.boundary == Boundary::dirichlet_zero) u.front() = u.back() = 0.0;
    return u;
}

// u at t = dt: exact heat flow of the densities, band-limited smoothing of the atoms.
inline std::vector<double> first_step(const InitialMeasure& mu, const SimConfig& c, HeatPropagator& prop) {
    const std::size_t nodes = c.nodes();
    std::vector<double> u(nodes, 0.0);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double x = -c.L + c.dx * static_cast<double>(j);
        for (const auto& wd : mu.densities()) u[j] += wd.weight * density_heat_flow(wd.density, c.nu, c.dt, x);
    }
    for (const auto& a : mu.atoms()) prop.add_band_limited_atom(u, a.location, a.mass);
    if (c.boundary == Boundary::dirichlet_zero) u.front() = u.back() = 0.0;
    return u;
}

inline void add_noise(std::vector<double>& u, const std::vector<double>& prev, const Rho& rho, const SimConfig& c, std::uint32_t rep,
                      std::uint32_t step) {
    if (rho.is_zero()) return;
    const double scale = std::sqrt(c.dt / c.dx);
    const std::size_t lo = c.boundary == Boundary::dirichlet_zero ? 1 : 0;
    const std::size_t hi = c.boundary == Boundary::dirichlet_zero ? u.size() - 1 : u.size();
    for (std::size_t j = lo & ~std::size_t{1}; j < hi; j += 2) {
        const auto [z0, z1] = rng_normal_pair(c.seed, rep, step, static_cast<std::uint32_t>(j >> 1));
        if (j >= lo) u[j] += rho(prev[j]) * scale * z0;
        if (j + 1 < hi) u[j + 1] += rho(prev[j + 1]) * scale * z1;
    }
}

inline void check_blowup(const std::vector<double>& u, std::uint64_t rep, std::size_t step) {
    for (double v : u)
        if (!(std::abs(v) <= 1e12))
            throw NumericalBlowup("simulation blew up (|u| > 1e12) at step " + std::to_string(step), rep);
}

}  // namespace detail

// Runs the M replicates in order and hands each finished field to sink(const LatticeField&).
template <class Sink>
void simulate(const InitialMeasure& mu, const Rho& rho, const SimConfig& cfg, Sink&& sink) {
    cfg.validate();
    if (!check_j0_finite(mu, cfg.nu, cfg.T, 0.0)) throw DivergentJ0("simulate: initial data is not admissible on [0, T]");
    const std::size_t nodes = cfg.nodes(), steps = cfg.steps();
    detail::HeatPropagator prop(cfg);
    const std::vector<double> row0 = detail::rasterize(mu, cfg);
    const std::vector<double> row1 = cfg.scheme == Scheme::exponential_mild ? detail::first_step(mu, cfg, prop) : std::vector<double>{};
    const double r = cfg.nu * cfg.dt / (2.0 * cfg.dx * cfg.dx);
    std::vector<double> u(nodes), prev(nodes);
    for (std::size_t rep = 0; rep < cfg.M; ++rep) {
        LatticeField f;
        f.replicate = rep;
        f.nx = nodes;
        f.x0 = -cfg.L;
        f.dx = cfg.dx;
        f.dt = cfg.dt;
        f.nu = cfg.nu;
        f.stride = cfg.save_every;
        f.values.reserve((steps / cfg.save_every + 1) * nodes);
        f.values.insert(f.values.end(), row0.begin(), row0.end());
        const auto rep32 = static_cast<std::uint32_t>(rep);
        std::size_t n0 = 0;
        if (cfg.scheme == Scheme::exponential_mild) {
            // noise starts after the exact smoothing step
            u = row1;
            n0 = 1;
            if (cfg.save_every == 1) f.values.insert(f.values.end(), u.begin(), u.end());
        } else {
            u = row0;
        }
        for (std::size_t n = n0; n < steps; ++n) {
            prev = u;
            if (cfg.scheme == Scheme::exponential_mild) {
                prop.apply(u);
            } else if (cfg.boundary == Boundary::periodic) {
                for (std::size_t j = 0; j < nodes; ++j) {
                    const double l = prev[(j + nodes - 1) % nodes], rr = prev[(j + 1) % nodes];
                    u[j] = prev[j] + r * (l - 2.0 * prev[j] + rr);
                }
            } else {
                for (std::size_t j = 1; j + 1 < nodes; ++j) u[j] = prev[j] + r * (prev[j - 1] - 2.0 * prev[j] + prev[j + 1]);
                u.front() = u.back() = 0.0;
            }
            detail::add_noise(u, prev, rho, cfg, rep32, static_cast<std::uint32_t>(n));
            detail::check_blowup(u, rep, n + 1);
            if ((n + 1) % cfg.save_every == 0) f.values.insert(f.values.end(), u.begin(), u.end());
        }
        sink(static_cast<const LatticeField&>(f));
    }
}

inline std::vector<LatticeField> simulate_all(const InitialMeasure& mu, const Rho& rho, const SimConfig& cfg) {
    std::vector<LatticeField> out;
    simulate(mu, rho, cfg, [&](const LatticeField& f) { out.push_back(f); });
    return out;
}

// E[u(t,x)^2] of the periodic exponential_mild lattice scheme itself, for constant data and rho^2 = lambda^2 (vv^2 + u^2).
// The second-moment matrix is circulant: c_{n+1}^(k) = p_k^2 c_n^(k) + lambda^2 (dt/dx) (vv^2 + c_n(0)).
inline double lattice_second_moment_lebesgue(const SimConfig& cfg, double lambda, double vv, double t) {
    cfg.validate();
    if (cfg.boundary != Boundary::periodic || cfg.scheme != Scheme::exponential_mild)
        throw InvalidArgument("lattice_second_moment_lebesgue: needs the periodic exponential_mild scheme");
    const std::size_t N = cfg.cells(), half = N / 2 + 1;
    const double s = std::round(t / cfg.dt);
    if (s < 1.0 || s > static_cast<double>(cfg.steps())) throw InvalidArgument("lattice_second_moment_lebesgue: t outside (0, T]");
    std::vector<double> p2(half), c(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        const double xi = kPi * static_cast<double>(k) / cfg.L;
        p2[k] = std::exp(-cfg.nu * cfg.dt * xi * xi);
    }
    // mode multiplicity in the full DFT
    auto mult = [&](std::size_t k) { return (k == 0 || (N % 2 == 0 && k == N / 2)) ? 1.0 : 2.0; };
    c[0] = static_cast<double>(N);  // u^1 == 1
    double m = 1.0;
    const double q = lambda * lambda * cfg.dt / cfg.dx;
    for (std::size_t n = 1; n < static_cast<std::size_t>(s); ++n) {
        const double add = q * (vv * vv + m);
        double sum = 0.0;
        for (std::size_t k = 0; k < half; ++k) {
            c[k] = p2[k] * c[k] + add;
            sum += mult(k) * c[k];
        }
        m = sum / static_cast<double>(N);
    }
    return m;
}

// ------------------------------------------------------------------ estimates

// Pairwise summation in a fixed tree order: bit-stable for a fixed input order.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t M = 0;
    int p = 2;
    double t = 0.0, x = 0.0, y = 0.0;         // snapped lattice coordinates
    double t_offset = 0.0, x_offset = 0.0;    // snapped minus requested
    bool two_point = false;
};

// Mean and standard error of per-replicate samples.
inline MomentEstimate estimate_from_samples(const std::vector<double>& s) {
    if (s.size() < 2) throw InsufficientReplicates("need at least 2 replicates, got " + std::to_string(s.size()));
    MomentEstimate e;
    e.M = s.size();
    const double n = static_cast<double>(s.size());
    e.mean = pairwise_sum(s.data(), s.size()) / n;
    std::vector<double> dev(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) dev[i] = (s[i] - e.mean) * (s[i] - e.mean);
    const double var = pairwise_sum(dev.data(), dev.size()) / (n - 1.0);
    e.std_error = std::sqrt(var / n);
    return e;
}

// Records u(t,x) (or u(t,x) u(t,y)) per replicate at snapped lattice points while fields stream by.
class ProbeRecorder {
public:
    struct Probe {
        double t, x, y;
        bool two_point;
    };

    std::size_t add_point(double t, double x) {
        probes_.push_back({t, x, x, false});
        samples_.emplace_back();
        return probes_.size() - 1;
    }
    std::size_t add_two_point(double t, double x, double y) {
        probes_.push_back({t, x, y, true});
        samples_.emplace_back();
        return probes_.size() - 1;
    }

    void operator()(const LatticeField& f) {
        if (!snapped_) {
            snap_.clear();
            for (const auto& p : probes_) snap_.push_back({f.nearest_row(p.t), f.nearest_node(p.x), f.nearest_node(p.y)});
            first_ = f;
            first_.values.clear();
            snapped_ = true;
        }
        for (std::size_t i = 0; i < probes_.size(); ++i) {
            const auto& s = snap_[i];
            const double a = f.at(s.row, s.jx);
            samples_[i].push_back(probes_[i].two_point ? a * f.at(s.row, s.jy) : a);
        }
    }

    const std::vector<double>& samples(std::size_t i) const { return samples_.at(i); }

    // E[u^p] at point probe i, or E[u(t,x)u(t,y)] at a two-point probe (p ignored).
    MomentEstimate estimate(std::size_t i, int p = 2) const {
        if (!snapped_) throw InsufficientReplicates("no replicates recorded");
        const auto& pr = probes_.at(i);
        if (!pr.two_point && p < 1) throw InvalidArgument("moment order must be >= 1");
        std::vector<double> v = samples_[i];
        if (!pr.two_point)
            for (double& a : v) a = std::pow(a, p);
        MomentEstimate e = estimate_from_samples(v);
        const auto& s = snap_[i];
        e.p = pr.two_point ? 2 : p;
        e.two_point = pr.two_point;
        e.t = first_.t(s.row);
        e.x = first_.x(s.jx);
        e.y = first_.x(s.jy);
        e.t_offset = e.t - pr.t;
        e.x_offset = e.x - pr.x;
        return e;
    }

private:
    struct Snap {
        std::size_t row, jx, jy;
    };
    std::vector<Probe> probes_;
    std::vector<Snap> snap_;
    std::vector<std::vector<double>> samples_;
    LatticeField first_;
    bool snapped_ = false;
};

inline MomentEstimate mc_moment(const std::vector<LatticeField>& fields, int p, double t, double x) {
    ProbeRecorder rec;
    rec.add_point(t, x);
    for (const auto& f : fields) rec(f);
    if (fields.empty()) throw InsufficientReplicates("no fields");
    return rec.estimate(0, p);
}

inline MomentEstimate mc_two_point(const std::vector<LatticeField>& fields, double t, double x, double y) {
    ProbeRecorder rec;
    rec.add_two_point(t, x, y);
    for (const auto& f : fields) rec(f);
    if (fields.empty()) throw InsufficientReplicates("no fields");
    return rec.estimate(0);
}

// ------------------------------------------------------------------ Hölder exponents

enum class Direction { space, time };

struct HolderWindow {
    double h_min = 0.0;  // lags are dyadic multiples 2^k of the lattice step inside [h_min, h_max]
    double h_max = 0.0;
    double x_span = 1.0;  // base points x with |x| <= x_span
};

struct HolderEstimate {
    double exponent = 0.0;
    double residual = 0.0;  // RMS residual of the log-log fit
    std::vector<double> lags, variogram;
};

// Streams fields and accumulates E|u(z + h) - u(z)|^2 over replicates and base points.
class VariogramAccumulator {
public:
    VariogramAccumulator(Direction dir, double t0, HolderWindow w) : dir_(dir), t0_(t0), w_(w) {
        if (!(t0 > 0.0)) throw InvalidArgument("holder estimate: t0 must be > 0 (away from the initial time line)");
    }

    void operator()(const LatticeField& f) {
        if (!init_) setup(f);
        const std::size_t r0 = f.nearest_row(t0_);
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const std::size_t k = steps_[i];
            double s = 0.0;
            for (std::size_t j = j_lo_; j <= j_hi_; ++j) {
                const double a = f.at(r0, j);
                const double b = dir_ == Direction::space ? f.at(r0, j + k) : f.at(r0 + k, j);
                s += (b - a) * (b - a);
            }
            sums_[i] += s / static_cast<double>(j_hi_ - j_lo_ + 1);
        }
        ++count_;
    }

    HolderEstimate estimate() const {
        if (count_ == 0) throw InsufficientReplicates("holder estimate: no fields");
        HolderEstimate e;
        const std::size_t n = steps_.size();
        std::vector<double> lx(n), ly(n);
        for (std::size_t i = 0; i < n; ++i) {
            e.lags.push_back(lags_[i]);
            e.variogram.push_back(sums_[i] / static_cast<double>(count_));
            lx[i] = std::log(lags_[i]);
            ly[i] = std::log(e.variogram.back());
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += lx[i] / n;
            my += ly[i] / n;
        }
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        const double slope = sxy / sxx;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ly[i] - (my + slope * (lx[i] - mx));
            ss += d * d;
        }
        e.exponent = slope / 2.0;
        e.residual = std::sqrt(ss / n);
        return e;
    }

private:
    void setup(const LatticeField& f) {
        const double step = dir_ == Direction::space ? f.dx : f.dt * static_cast<double>(f.stride);
        for (std::size_t k = 1; k < (std::size_t{1} << 40); k <<= 1) {
            const double h = step * static_cast<double>(k);
            if (h > w_.h_max * (1 + 1e-12)) break;
            if (h >= w_.h_min * (1 - 1e-12)) {
                steps_.push_back(k);
                lags_.push_back(h);
            }
        }
        if (steps_.size() < 4) throw WindowTooNarrow("holder estimate: fewer than 4 dyadic lags fit in the window");
        const std::size_t r0 = f.nearest_row(t0_);
        if (dir_ == Direction::time && r0 + steps_.back() >= f.rows())
            throw WindowTooNarrow("holder estimate: the largest time lag runs past the saved horizon");
        j_lo_ = f.nearest_node(-w_.x_span);
        j_hi_ = f.nearest_node(w_.x_span);
        if (dir_ == Direction::space && j_hi_ + steps_.back() >= f.nx)
            throw WindowTooNarrow("holder estimate: the largest space lag runs past the lattice");
        sums_.assign(steps_.size(), 0.0);
        init_ = true;
    }

    Direction dir_;
    double t0_;
    HolderWindow w_;
    bool init_ = false;
    std::vector<std::size_t> steps_;
    std::vector<double> lags_, sums_;
    std::size_t j_lo_ = 0, j_hi_ = 0, count_ = 0;
};

inline HolderEstimate holder_estimate(const std::vector<LatticeField>& fields, Direction dir, double t0, const HolderWindow& w) {
    VariogramAccumulator acc(dir, t0, w);
    for (const auto& f : fields) acc(f);
    return acc.estimate();
}

}  // namespace she
