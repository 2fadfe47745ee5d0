#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "she/growth_analysis.hpp"
#include "she/initial_data.hpp"
#include "she/io.hpp"
#include "she/moment_calculus.hpp"
#include "she/moment_kernels.hpp"
#include "she/picard.hpp"
#include "she/quadrature.hpp"
#include "she/spde_simulator.hpp"

namespace she {

struct CriterionInfo {
    int id;
    std::string key;
    std::string title;
    double budget_seconds;  // 0: no runtime bound
};

inline const std::vector<CriterionInfo>& criteria() {
    static const std::vector<CriterionInfo> list = {
        {1, "kernel-identity", "H equals the space-time integral of K", 10},
        {2, "closed-vs-quadrature", "closed forms vs general quadrature evaluator", 60},
        {3, "bc-identities", "Bertini-Cancrini integral corrections", 30},
        {4, "bc-moment", "Bertini-Cancrini second moment equals 1 + H", 0},
        {5, "picard", "Picard iteration converges (Lebesgue, delta) and diverges (delta')", 120},
        {6, "mc-moment", "Monte Carlo second moment vs closed forms", 300},
        {7, "mean-preservation", "Monte Carlo mean equals J0", 0},
        {8, "growth", "growth-index transition", 180},
        {9, "lyapunov", "Lyapunov ratios and bound dominance", 0},
        {10, "holder", "Hoelder exponents from variograms", 300},
        {11, "sandwich", "lower <= exact <= upper moment bounds", 0},
        {12, "determinism", "byte-identical repeated runs", 0},
    };
    return list;
}

inline const CriterionInfo& criterion_by_key(const std::string& key) {
    for (const auto& c : criteria())
        if (c.key == key || std::to_string(c.id) == key) return c;
    throw ConfigError("unknown criterion '" + key + "'");
}

struct CriterionResult {
    int id = 0;
    std::string key, title;
    bool passed = false;
    std::string measured;  // measured errors and values
    double seconds = 0.0;
    double budget_seconds = 0.0;
    bool quick = false;
};

struct CampaignOptions {
    bool quick = false;            // fewer replicates, wider bands
    std::uint64_t seed = 20240611;
    std::size_t mc_replicates = 10000;
    std::size_t holder_replicates = 200;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

struct Report {
    bool ok = true;
    std::ostringstream msg;
    void check(bool c) { ok = ok && c; }
};

}  // namespace detail

class Campaign {
public:
    explicit Campaign(CampaignOptions opt = {}) : opt_(opt) {
        if (opt_.quick) {
            opt_.mc_replicates = std::min<std::size_t>(opt_.mc_replicates, 1000);
            opt_.holder_replicates = std::min<std::size_t>(opt_.holder_replicates, 50);
        }
    }

    const CampaignOptions& options() const { return opt_; }

    CriterionResult run(int id) {
        const auto& info = criteria().at(static_cast<std::size_t>(id - 1));
        CriterionResult r;
        r.id = id;
        r.key = info.key;
        r.title = info.title;
        r.budget_seconds = info.budget_seconds;
        r.quick = opt_.quick;
        const auto t0 = std::chrono::steady_clock::now();
        detail::Report rep;
        try {
            switch (id) {
                case 1: kernel_identity(rep); break;
                case 2: closed_vs_quadrature(rep); break;
                case 3: bc_identities(rep); break;
                case 4: bc_moment(rep); break;
                case 5: picard(rep); break;
                case 6: mc_moment(rep); break;
                case 7: mean_preservation(rep); break;
                case 8: growth(rep); break;
                case 9: lyapunov(rep); break;
                case 10: holder(rep); break;
                case 11: sandwich(rep); break;
                case 12: determinism(rep); break;
                default: throw ConfigError("no criterion " + std::to_string(id));
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            rep.ok = false;
            rep.msg << "exception: " << e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.passed = rep.ok && (r.budget_seconds == 0.0 || r.seconds < r.budget_seconds);
        r.measured = rep.msg.str();
        if (r.budget_seconds > 0.0 && r.seconds >= r.budget_seconds) r.measured += "; runtime over budget";
        return r;
    }

private:
    // 1: H(t) against an adaptive space-time quadrature of K
    void kernel_identity(detail::Report& rep) {
        double worst = 0.0;
        for (double t : {0.25, 0.5, 1.0, 2.0})
            for (double nu : {0.5, 1.0})
                for (double lam : {0.5, 1.0, 2.0}) {
                    const KernelParams kp(nu, lam);
                    QuadOptions inner;
                    inner.rel_tol = 1e-12;
                    QuadOptions outer;
                    outer.rel_tol = 1e-11;
                    const auto q = integrate_sqrt_ends(
                        [&](double s) {
                            if (!(s > 0.0)) return 0.0;
                            return integrate_line([&](double y) { return kernel_K(s, y, kp); }, {0.0}, std::sqrt(nu * s), inner).value;
                        },
                        0.0, t, true, false, {}, outer);
                    worst = std::max(worst, std::abs(q.value / kernel_H(t, kp) - 1.0));
                }
        rep.check(worst < 1e-6);
        rep.msg << "max rel err " << detail::fmt("%.3e", worst) << " (24 cases, tol 1e-6)";
    }

    // 2: general quadrature path vs closed forms on a 5x5 grid
    void closed_vs_quadrature(detail::Report& rep) {
        const double nu = 1.0, lam = 1.0;
        const KernelParams kp(nu, lam);
        double wl = 0.0, wd = 0.0;
        for (double t : {0.1, 0.25, 0.5, 1.0, 2.0})
            for (double x : {-1.0, -0.3, 0.0, 0.5, 1.5}) {
                MomentRequest r{InitialMeasure::lebesgue(), GrowthEnvelope::quasi_linear(lam, 0.0), nu, 2, t, x};
                wl = std::max(wl, std::abs(second_moment_exact(r, Evaluation::quadrature).value / (1.0 + kernel_H(t, kp)) - 1.0));
                r.mu = InitialMeasure::dirac();
                const double ref = kernel_K(t, x, kp) / (lam * lam);
                wd = std::max(wd, std::abs(second_moment_exact(r, Evaluation::quadrature).value / ref - 1.0));
            }
        rep.check(wl < 1e-4 && wd < 1e-3);
        rep.msg << "lebesgue max rel " << detail::fmt("%.3e", wl) << " (tol 1e-4); dirac max rel " << detail::fmt("%.3e", wd)
                << " (tol 1e-3)";
    }

    // 3: Bertini-Cancrini integrals against the corrected two-point formulas
    void bc_identities(detail::Report& rep) {
        std::mt19937_64 rng(opt_.seed ^ 3u);
        std::uniform_real_distribution<double> ut(0.1, 2.0), ux(-2.0, 2.0), un(0.5, 1.5);
        double wl = 0.0, wd = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double nu = un(rng), t = ut(rng), x = ux(rng), y = ux(rng);
            const double diff = two_point_lebesgue(nu, 1.0, 0.0, t, x, y) - bc_lebesgue_integral(nu, t, x, y);
            wl = std::max(wl, std::abs(diff - std::erf(std::abs(x - y) / std::sqrt(4.0 * nu * t))));
        }
        for (int i = 0; i < 10; ++i) {
            const double nu = un(rng), t = ut(rng), x = ux(rng), y = ux(rng);
            wd = std::max(wd, std::abs(bc_delta_integral(nu, t, x, y) - two_point_delta(nu, 1.0, 0.0, t, x, y)));
        }
        rep.check(wl < 1e-6 && wd < 1e-6);
        rep.msg << "lebesgue max abs " << detail::fmt("%.3e", wl) << ", delta max abs " << detail::fmt("%.3e", wd) << " (tol 1e-6)";
    }

    // 4
    void bc_moment(detail::Report& rep) {
        double worst = 0.0;
        for (double nu : {0.5, 1.0, 2.0})
            for (double t : {0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0})
                worst = std::max(worst, std::abs(bc_moment_lebesgue(2, nu, t) - (1.0 + kernel_H(t, KernelParams(nu, 1.0)))));
        rep.check(worst < 1e-10);
        rep.msg << "max abs " << detail::fmt("%.3e", worst) << " (tol 1e-10)";
    }

    // 5
    void picard(detail::Report& rep) {
        const KernelParams kp(1.0, 1.0);
        auto monotone = [](const std::vector<double>& d) {
            for (std::size_t n = 1; n < d.size(); ++n)
                if (d[n] > d[n - 1] * (1.0 + 1e-9) + 1e-15) return false;
            return true;
        };
        {
            const auto r = picard_second_moment(InitialMeasure::lebesgue(), 1.0, 1.0, 0.0);
            std::vector<double> d;
            for (const auto& f : r.iterates) d.push_back(sup_distance(f, [&](double t, double) { return 1.0 + kernel_H(t, kp); }));
            const bool ok = r.status == PicardStatus::converged && r.iterations <= 30 && monotone(d) && d.back() < 1e-3;
            rep.check(ok);
            rep.msg << "lebesgue " << r.status_label() << " n=" << r.iterations << " sup err " << detail::fmt("%.3e", d.back())
                    << (monotone(d) ? " monotone" : " NOT monotone") << "; ";
        }
        {
            const auto r = picard_second_moment(InitialMeasure::dirac(), 1.0, 1.0, 0.0);
            std::vector<double> d;
            for (const auto& f : r.iterates) d.push_back(layer_relative_distance(f, [&](double t, double x) { return kernel_K(t, x, kp); }, 1));
            const bool ok = r.status == PicardStatus::converged && r.iterations <= 30 && monotone(d) && d.back() < 1e-2;
            rep.check(ok);
            rep.msg << "delta " << r.status_label() << " n=" << r.iterations << " rel err " << detail::fmt("%.3e", d.back())
                    << (monotone(d) ? " monotone" : " NOT monotone") << "; ";
        }
        {
            const auto r = picard_second_moment(DistributionalInput{1, 0.0, 1.0}, 1.0, 1.0, 0.0);
            rep.check(r.status == PicardStatus::diverged && r.iterations <= 10);
            rep.msg << "delta' " << r.status_label();
        }
    }

    struct McRuns {
        MomentEstimate leb, dirac, leb_two_point;
        std::vector<MomentEstimate> leb_means, dirac_means;
        double leb_ref = 0.0, dirac_ref = 0.0, two_point_ref = 0.0;
        std::vector<double> dirac_mean_refs;
        double seconds = 0.0;
    };

    static constexpr double kMeanNodes[6] = {-1.5, -0.75, 0.0, 0.5, 1.0, 2.0};

    const McRuns& mc_runs() {
        if (mc_) return *mc_;
        const auto t0 = std::chrono::steady_clock::now();
        McRuns m;
        const double nu = 1.0, lam = 0.5;
        SimConfig c;
        c.nu = nu;
        c.dx = 0.05;
        c.dt = c.dx * c.dx / 4.0;
        c.L = 5.0;
        c.M = opt_.mc_replicates;
        c.seed = opt_.seed;
        {
            // periodic is exact for constant data
            c.T = 0.5;
            c.save_every = c.steps();
            c.boundary = Boundary::periodic;
            ProbeRecorder rec;
            rec.add_point(0.5, 0.0);
            rec.add_two_point(0.5, 0.0, 0.5);
            for (double x : kMeanNodes) rec.add_point(0.5, x);
            simulate(InitialMeasure::lebesgue(), Rho::pam(lam), c, rec);
            m.leb = rec.estimate(0, 2);
            m.leb_two_point = rec.estimate(1);
            for (std::size_t i = 0; i < 6; ++i) m.leb_means.push_back(rec.estimate(2 + i, 1));
            m.leb_ref = 1.0 + kernel_H(0.5, KernelParams(nu, lam));
            m.two_point_ref = two_point_lebesgue(nu, lam, 0.0, 0.5, 0.0, m.leb_two_point.y);
        }
        {
            c.T = 0.25;
            c.save_every = c.steps();
            c.boundary = Boundary::dirichlet_zero;
            ProbeRecorder rec;
            rec.add_point(0.25, 0.0);
            for (double x : kMeanNodes) rec.add_point(0.25, x);
            simulate(InitialMeasure::dirac(), Rho::pam(lam), c, rec);
            m.dirac = rec.estimate(0, 2);
            for (std::size_t i = 0; i < 6; ++i) {
                m.dirac_means.push_back(rec.estimate(1 + i, 1));
                m.dirac_mean_refs.push_back(heat_kernel(nu, 0.25, m.dirac_means.back().x));
            }
            m.dirac_ref = kernel_K(0.25, 0.0, KernelParams(nu, lam)) / (lam * lam);
        }
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        mc_ = std::move(m);
        return *mc_;
    }

    // 6
    void mc_moment(detail::Report& rep) {
        const McRuns& m = mc_runs();
        const double band_l = opt_.quick ? 0.10 : 0.05, band_d = opt_.quick ? 0.20 : 0.10;
        const double el = std::abs(m.leb.mean - m.leb_ref), ed = std::abs(m.dirac.mean - m.dirac_ref);
        rep.check(el <= 3.0 * m.leb.std_error + band_l * m.leb_ref);
        rep.check(ed <= band_d * m.dirac_ref);
        rep.msg << "M=" << m.leb.M << "; lebesgue " << detail::fmt("%.6f", m.leb.mean) << " +- " << detail::fmt("%.2e", m.leb.std_error)
                << " vs " << detail::fmt("%.6f", m.leb_ref) << " (rel " << detail::fmt("%.3e", el / m.leb_ref) << "); delta "
                << detail::fmt("%.6f", m.dirac.mean) << " +- " << detail::fmt("%.2e", m.dirac.std_error) << " vs "
                << detail::fmt("%.6f", m.dirac_ref) << " (rel " << detail::fmt("%.3e", ed / m.dirac_ref) << "); two-point (0.5,0,"
                << detail::fmt("%.2f", m.leb_two_point.y) << ") " << detail::fmt("%.6f", m.leb_two_point.mean) << " vs "
                << detail::fmt("%.6f", m.two_point_ref) << " [info]";
    }

    // 7: same runs as 6; its time is charged to whichever criterion triggers them
    void mean_preservation(detail::Report& rep) {
        const McRuns& m = mc_runs();
        double worst = 0.0;  // in units of stderr
        for (std::size_t i = 0; i < 6; ++i) {
            const double zl = std::abs(m.leb_means[i].mean - 1.0) / m.leb_means[i].std_error;
            const double zd = std::abs(m.dirac_means[i].mean - m.dirac_mean_refs[i]) / m.dirac_means[i].std_error;
            rep.check(zl <= 3.0 && zd <= 3.0);
            worst = std::max({worst, zl, zd});
        }
        rep.msg << "12 nodes, max |mean - J0| / stderr = " << detail::fmt("%.3f", worst) << " (tol 3)";
    }

    // 8
    void growth(detail::Report& rep) {
        GrowthOptions opt;
        opt.grid_points = 6;
        const auto r1 = empirical_growth_index(InitialMeasure::exp_decay(1.0), 1.0, 1.0, {0.1, 1.1}, opt);
        const auto r2 = empirical_growth_index(InitialMeasure::exp_decay(0.25), 1.0, 1.0, {0.1, 1.1}, opt);
        const auto rd = empirical_growth_index(InitialMeasure::dirac(), 1.0, 1.0, {0.1, 1.1}, opt);
        const double e1 = std::abs(r1.empirical_transition / 0.5 - 1.0), e2 = std::abs(r2.empirical_transition / 0.625 - 1.0);
        rep.check(e1 <= 0.05 && e2 <= 0.05);
        rep.check(rd.empirical_transition >= 0.45 && rd.empirical_transition <= 0.55);
        rep.msg << "beta=1: " << detail::fmt("%.4f", r1.empirical_transition) << " (rel " << detail::fmt("%.2e", e1) << "); beta=0.25: "
                << detail::fmt("%.4f", r2.empirical_transition) << " (rel " << detail::fmt("%.2e", e2) << "); delta: "
                << detail::fmt("%.4f", rd.empirical_transition) << " (band [0.45, 0.55])";
    }

    // 9
    void lyapunov(detail::Report& rep) {
        int fails = 0;
        for (double lam : {0.5, 1.0, 2.0})
            for (double nu : {0.5, 1.0}) {
                for (int n = 2; n < 8; ++n)
                    if (!(lyapunov_exact_pam(n, lam, nu) / n < lyapunov_exact_pam(n + 1, lam, nu) / (n + 1))) ++fails;
                for (int p = 2; p <= 8; p += 2)
                    if (!(lyapunov_bound_lebesgue(p, std::abs(lam), nu, true) >= lyapunov_exact_pam(p, lam, nu))) ++fails;
            }
        rep.check(fails == 0);
        rep.msg << fails << " violations (ratios n=2..8, dominance p=2,4,6,8; 6 parameter pairs)";
    }

    // 10
    void holder(detail::Report& rep) {
        SimConfig c;
        c.nu = 1.0;
        // finer than the moment runs: the variogram bends over beyond lags of about 0.4
        c.dx = 0.025;
        c.dt = c.dx * c.dx / 4.0;
        c.L = 7.5;
        c.T = 0.66;
        c.M = opt_.holder_replicates;
        c.seed = opt_.seed + 10;
        c.boundary = Boundary::periodic;
        c.x_query_max = 1.5;
        VariogramAccumulator space(Direction::space, 0.5, {c.dx, 8 * c.dx, 1.5});
        VariogramAccumulator time(Direction::time, 0.5, {0.005, 0.16, 1.5});
        simulate(InitialMeasure::lebesgue(), Rho::pam(1.0), c, [&](const LatticeField& f) {
            space(f);
            time(f);
        });
        const auto hs = space.estimate(), ht = time.estimate();
        rep.check(hs.exponent >= 0.4 && hs.exponent <= 0.6);
        rep.check(ht.exponent >= 0.15 && ht.exponent <= 0.35);
        rep.msg << "M=" << c.M << "; space " << detail::fmt("%.4f", hs.exponent) << " (residual " << detail::fmt("%.2e", hs.residual)
                << ", band [0.4, 0.6]); time " << detail::fmt("%.4f", ht.exponent) << " (residual " << detail::fmt("%.2e", ht.residual)
                << ", band [0.15, 0.35])";
    }

    // 11
    void sandwich(detail::Report& rep) {
        std::mt19937_64 rng(opt_.seed ^ 11u);
        std::uniform_real_distribution<double> ut(0.05, 2.0), ux(-2.0, 2.0), ul(0.3, 2.0), uv(0.0, 1.0);
        const InitialMeasure measures[] = {InitialMeasure::dirac(0.2), InitialMeasure::lebesgue(),
                                           InitialMeasure::from_atoms({{-0.4, 1.0}, {0.6, 0.5}})};
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const MomentRequest r{measures[i % 3], GrowthEnvelope::quasi_linear(ul(rng), uv(rng)), 1.0, 2, ut(rng), ux(rng)};
            const double lo = second_moment_lower(r).value, ex = second_moment_exact(r).value, up = pth_moment_upper(r).norm_sq_bound;
            rep.check(lo <= ex * (1 + 1e-10) && ex <= up * (1 + 1e-10));
            worst = std::max({worst, std::abs(lo / ex - 1.0), std::abs(up / ex - 1.0)});
        }
        rep.check(worst <= 1e-10);
        int strict_fail = 0;
        const auto env = GrowthEnvelope::bounds(1.2, 1.2, 0.0, 0.8, 0.0);
        for (int i = 0; i < 10; ++i) {
            const MomentRequest r{measures[i % 3], env, 1.0, 2, ut(rng), ux(rng)};
            const double lo = second_moment_lower(r).value, up = pth_moment_upper(r).norm_sq_bound;
            const double mid = second_moment(r.mu, 1.0, 1.0, 0.0, r.t, r.x).value;
            if (!(lo < mid && mid < up)) ++strict_fail;
        }
        rep.check(strict_fail == 0);
        rep.msg << "quasi-linear max rel gap " << detail::fmt("%.3e", worst) << " at 100 points (tol 1e-10); spread envelope " << strict_fail
                << " strict-order violations at 10 points";
    }

    // 12
    void determinism(detail::Report& rep) {
        auto once = [&] {
            SimConfig c;
            c.T = 0.05;
            c.M = 6;
            c.seed = opt_.seed;
            std::ostringstream os;
            std::vector<MomentEstimate> est;
            ProbeRecorder rec;
            rec.add_point(0.05, 0.0);
            rec.add_two_point(0.05, 0.0, 0.3);
            simulate(InitialMeasure::dirac(), Rho::pam(1.0), c, [&](const LatticeField& f) {
                rec(f);
                if (f.replicate == 0) {
                    write_snapshot(os, f);
                    write_field_csv(os, f);
                }
            });
            est.push_back(rec.estimate(0, 2));
            est.push_back(rec.estimate(1));
            write_estimate_csv(os, est);
            std::vector<FormulaRow> rows;
            for (double t : {0.3, 1.0}) {
                const MomentRequest r{InitialMeasure::exp_decay(1.0), GrowthEnvelope::quasi_linear(1.0, 0.0), 1.0, 2, t, 0.2};
                const auto v = second_moment_exact(r);
                rows.push_back({"second_moment_exact", t, 0.2, std::nullopt, 2, v.value, v.branch, v.tolerance_met});
            }
            write_formula_csv(os, rows);
            return os.str();
        };
        const std::string a = once(), b = once();
        rep.check(a == b && !a.empty());
        rep.msg << (a == b ? "identical" : "DIFFERENT") << " (" << a.size() << " bytes: snapshot, field CSV, estimates, formula table)";
    }

    CampaignOptions opt_;
    std::optional<McRuns> mc_;
};

// Runs the selected criteria (all when keys is empty) in order, calling on_result after each.
inline std::vector<CriterionResult> run_campaign(const CampaignOptions& opt, const std::vector<std::string>& keys = {},
                                                 const std::function<void(const CriterionResult&)>& on_result = {}) {
    std::vector<int> ids;
    if (keys.empty())
        for (const auto& c : criteria()) ids.push_back(c.id);
    else
        for (const auto& k : keys) ids.push_back(criterion_by_key(k).id);
    Campaign camp(opt);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(camp.run(id));
        if (on_result) on_result(out.back());
    }
    return out;
}

inline std::string format_result_line(const CriterionResult& r) {
    char head[160];
    std::snprintf(head, sizeof head, "[%s] %d %s%s (%.1f s", r.passed ? "PASS" : "FAIL", r.id, r.key.c_str(), r.quick ? " [quick]" : "",
                  r.seconds);
    std::string s = head;
    if (r.budget_seconds > 0.0) s += detail::fmt(", budget %.0f s", r.budget_seconds);
    return s + "): " + r.measured;
}

}  // namespace she
