// she: command-line entry point for the moment formulas, growth indices, simulator and validation campaign.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "she/growth_analysis.hpp"
#include "she/io.hpp"
#include "she/measure_parse.hpp"
#include "she/moment_calculus.hpp"
#include "she/spde_simulator.hpp"
#include "she/validation.hpp"

#ifndef SHE_VERSION
#define SHE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace she;

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kConfig = 2, kDivergence = 3 };

struct Common {
    double nu = 1.0, lambda = 1.0, vv = 0.0;
    std::string measure = "lebesgue";
    std::uint64_t seed = 1;
    std::string out = "she_out";
    std::string format = "csv";
    std::string config;
};

struct EnvelopeFlags {
    std::optional<double> lip_low, lip_up, vip_low, vip_up;
};

struct SimFlags {
    double L = 5.0, dx = 0.05, T = 0.5;
    std::optional<double> dt;
    std::size_t M = 100, save_every = 1;
    std::string scheme = "exponential_mild", boundary = "dirichlet_zero", rho;
    double x_query_max = 0.0;
};

// ---------------------------------------------------------------- config file

// Flat "key = value" lines; '#' starts a comment. Keys are long option names without dashes.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string t(detail::trim(line));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
        const std::string k(detail::trim(std::string_view(t).substr(0, eq))), v(detail::trim(std::string_view(t).substr(eq + 1)));
        if (k.empty()) throw ConfigError(path + ":" + std::to_string(n) + ": empty key");
        kv[k] = v;
    }
    return kv;
}

// File values fill options that were not given on the command line.
void apply_config_file(CLI::App* sub, const std::string& path) {
    for (const auto& [k, v] : read_config_file(path)) {
        CLI::Option* o = sub->get_option_no_throw("--" + k);
        if (!o) throw ConfigError("config file: unknown key '" + k + "' for command '" + sub->get_name() + "'");
        if (o->count() > 0) continue;
        try {
            if (o->get_type_size() == 0) {
                if (v == "true" || v == "1") o->add_result("true");
                else if (v != "false" && v != "0") throw ConfigError("config file: flag '" + k + "' needs true or false");
                else continue;
            } else {
                o->add_result(v);
            }
            o->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("config file: bad value for '" + k + "': " + e.what());
        }
    }
}

// ---------------------------------------------------------------- helpers

json jnum(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

void add_common(CLI::App* s, Common& c) {
    s->add_option("--nu", c.nu, "diffusion constant nu > 0")->capture_default_str();
    s->add_option("--lambda", c.lambda, "noise strength lambda")->capture_default_str();
    s->add_option("--vv", c.vv, "noise offset vv (rho^2 = lambda^2 (vv^2 + u^2))")->capture_default_str();
    s->add_option("--measure", c.measure, "initial measure, e.g. lebesgue, delta:0, exp_decay:1, atoms:(0,1);(1,0.5)")
        ->capture_default_str();
    s->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
    s->add_option("--out", c.out, "output directory")->capture_default_str();
    s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    s->add_option("--config", c.config, "flat key = value file; command-line flags win");
}

void add_envelope(CLI::App* s, EnvelopeFlags& e) {
    s->add_option("--lip-low", e.lip_low, "lower Lipschitz constant (bounds envelope)");
    s->add_option("--lip-up", e.lip_up, "upper Lipschitz constant (bounds envelope)");
    s->add_option("--vip-low", e.vip_low, "lower offset (bounds envelope)");
    s->add_option("--vip-up", e.vip_up, "upper offset (bounds envelope)");
}

void add_sim(CLI::App* s, SimFlags& f) {
    s->add_option("--L", f.L, "domain half-width")->capture_default_str();
    s->add_option("--dx", f.dx, "spatial step")->capture_default_str();
    s->add_option("--dt", f.dt, "time step (default dx^2/4)");
    s->add_option("--T", f.T, "horizon")->capture_default_str();
    s->add_option("--M", f.M, "replicates")->capture_default_str();
    s->add_option("--save-every", f.save_every, "keep every k-th time row")->capture_default_str();
    s->add_option("--scheme", f.scheme)->check(CLI::IsMember({"exponential_mild", "explicit_fd"}))->capture_default_str();
    s->add_option("--boundary", f.boundary)->check(CLI::IsMember({"dirichlet_zero", "periodic"}))->capture_default_str();
    s->add_option("--rho", f.rho, "pam, quasi_linear or zero (default: pam if vv = 0, else quasi_linear)")
        ->check(CLI::IsMember({"pam", "quasi_linear", "zero"}));
    s->add_option("--x-query-max", f.x_query_max, "largest |x| queried")->capture_default_str();
}

GrowthEnvelope make_envelope(const Common& c, const EnvelopeFlags& e) {
    if (!e.lip_low && !e.lip_up && !e.vip_low && !e.vip_up) return GrowthEnvelope::quasi_linear(c.lambda, c.vv);
    const double lu = e.lip_up.value_or(std::abs(c.lambda)), ll = e.lip_low.value_or(lu);
    const double vu = e.vip_up.value_or(std::abs(c.vv)), vl = e.vip_low.value_or(vu);
    return GrowthEnvelope::bounds(lu, lu, vu, ll, vl);
}

SimConfig make_sim(const Common& c, const SimFlags& f) {
    SimConfig s;
    s.L = f.L;
    s.dx = f.dx;
    s.dt = f.dt.value_or(f.dx * f.dx / 4.0);
    s.T = f.T;
    s.nu = c.nu;
    s.M = f.M;
    s.seed = c.seed;
    s.scheme = f.scheme == "explicit_fd" ? Scheme::explicit_fd : Scheme::exponential_mild;
    s.boundary = f.boundary == "periodic" ? Boundary::periodic : Boundary::dirichlet_zero;
    s.save_every = f.save_every;
    s.x_query_max = f.x_query_max;
    s.validate();
    return s;
}

Rho make_rho(const Common& c, const SimFlags& f) {
    const std::string kind = f.rho.empty() ? (c.vv == 0.0 ? "pam" : "quasi_linear") : f.rho;
    if (kind == "zero") return Rho::zero();
    if (kind == "pam") return Rho::pam(c.lambda);
    return Rho::quasi_linear(c.lambda, c.vv);
}

json sim_json(const SimConfig& s) {
    return json{{"L", s.L},          {"dx", s.dx},
                {"dt", s.dt},        {"T", s.T},
                {"nu", s.nu},        {"M", s.M},
                {"seed", s.seed},    {"scheme", to_string(s.scheme)},
                {"boundary", to_string(s.boundary)}, {"save_every", s.save_every},
                {"x_query_max", s.x_query_max}};
}

json common_json(const Common& c) {
    return json{{"nu", c.nu}, {"lambda", c.lambda}, {"vv", c.vv}, {"measure", c.measure}, {"seed", c.seed}, {"format", c.format}};
}

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory '" + dir + "'");
    }
    std::ofstream open(const std::string& name, bool binary = false) const {
        std::ofstream f(dir_ / name, binary ? std::ios::binary : std::ios::out);
        if (!f) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
        return f;
    }
    void manifest(const std::string& command, std::uint64_t seed, const json& config) const {
        json m{{"tool", "she"}, {"version", SHE_VERSION}, {"command", command}, {"seed", seed}, {"config", config}};
        open("manifest.json") << m.dump(2) << '\n';
    }

private:
    fs::path dir_;
};

std::vector<double> or_default(const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; }

// ---------------------------------------------------------------- commands

struct MomentsFlags {
    std::vector<double> t{1.0}, x{0.0};
    int p = 2;
    std::string kind = "exact";
    bool quadrature = false;
    EnvelopeFlags env;
};

int cmd_moments(const Common& c, const MomentsFlags& f) {
    const InitialMeasure mu = parse_measure(c.measure);
    const GrowthEnvelope env = make_envelope(c, f.env);
    if (f.p < 2 || f.p % 2 != 0) throw ConfigError("--p must be an even integer >= 2");
    const Evaluation ev = f.quadrature ? Evaluation::quadrature : Evaluation::automatic;
    std::vector<FormulaRow> rows;
    for (double t : f.t)
        for (double x : f.x) {
            const MomentRequest r{mu, env, c.nu, f.p, t, x};
            const bool exact_ok = f.p == 2 && env.quasi;
            if (f.kind == "exact" || f.kind == "all") {
                if (!exact_ok && f.kind == "exact") throw ConfigError("exact moments need p = 2 and a quasi-linear envelope; use --kind upper");
                if (exact_ok) {
                    const auto v = second_moment_exact(r, ev);
                    rows.push_back({"second_moment_exact", t, x, std::nullopt, 2, v.value, v.branch, v.tolerance_met});
                }
            }
            if ((f.kind == "lower" || f.kind == "all") && f.p == 2) {
                const auto v = second_moment_lower(r, ev);
                rows.push_back({"second_moment_lower", t, x, std::nullopt, 2, v.value, v.branch, v.tolerance_met});
            }
            if (f.kind == "upper" || f.kind == "all") {
                const auto v = pth_moment_upper(r, ev);
                rows.push_back({"pth_moment_upper", t, x, std::nullopt, f.p, v.moment_bound, v.branch, v.tolerance_met});
            }
        }
    const Output out(c.out);
    if (c.format == "csv") {
        auto os = out.open("moments.csv");
        write_formula_csv(os, rows);
    } else {
        json a = json::array();
        for (const auto& r : rows)
            a.push_back({{"formula_id", r.formula_id}, {"t", r.t}, {"x", r.x}, {"p", *r.p}, {"value", jnum(r.value)}, {"branch", r.branch},
                         {"tolerance_met", r.tolerance_met}});
        out.open("moments.json") << a.dump(2) << '\n';
    }
    write_formula_csv(std::cout, rows);
    json cfg = common_json(c);
    cfg["t"] = f.t;
    cfg["x"] = f.x;
    cfg["p"] = f.p;
    cfg["kind"] = f.kind;
    cfg["quadrature"] = f.quadrature;
    cfg["envelope"] = {{"lip_low", env.lip_low}, {"Lip_up", env.Lip_up}, {"vip_low", env.vip_low}, {"Vip_up", env.Vip_up}};
    out.manifest("moments", c.seed, cfg);
    return kOk;
}

struct TwoPointFlags {
    std::vector<double> t{1.0}, x{0.0}, y{0.5};
    std::size_t cache_nt = 200, cache_nx = 400;
};

int cmd_twopoint(const Common& c, const TwoPointFlags& f) {
    const InitialMeasure mu = parse_measure(c.measure);
    const auto env = GrowthEnvelope::quasi_linear(c.lambda, c.vv);
    const bool unit_lebesgue = mu.is_lebesgue() && mu.densities()[0].weight == 1.0;
    const bool unit_dirac = mu.is_pure_atomic() && mu.atoms().size() == 1 && mu.atoms()[0].location == 0.0 && mu.atoms()[0].mass == 1.0;
    std::vector<FormulaRow> rows;
    for (double t : f.t)
        for (double x : f.x)
            for (double y : f.y) {
                const MomentRequest r{mu, env, c.nu, 2, t, x};
                r.validate();
                if (unit_lebesgue)
                    rows.push_back({"two_point_lebesgue", t, x, y, 2, two_point_lebesgue(c.nu, c.lambda, c.vv, t, x, y), "closed-form", true});
                else if (unit_dirac)
                    rows.push_back({"two_point_delta", t, x, y, 2, two_point_delta(c.nu, c.lambda, c.vv, t, x, y), "closed-form", true});
                else
                    rows.push_back({"two_point_general", t, x, y, 2, two_point_general(r, y, TwoPointOptions{f.cache_nt, f.cache_nx, {}}), "general",
                                    true});
            }
    const Output out(c.out);
    if (c.format == "csv") {
        auto os = out.open("twopoint.csv");
        write_formula_csv(os, rows);
    } else {
        json a = json::array();
        for (const auto& r : rows)
            a.push_back({{"formula_id", r.formula_id}, {"t", r.t}, {"x", r.x}, {"y", *r.y}, {"value", jnum(r.value)}, {"branch", r.branch}});
        out.open("twopoint.json") << a.dump(2) << '\n';
    }
    write_formula_csv(std::cout, rows);
    json cfg = common_json(c);
    cfg["t"] = f.t;
    cfg["x"] = f.x;
    cfg["y"] = f.y;
    cfg["cache_nt"] = f.cache_nt;
    cfg["cache_nx"] = f.cache_nx;
    out.manifest("twopoint", c.seed, cfg);
    return kOk;
}

struct GrowthFlags {
    double alpha_lo = 0.1, alpha_hi = 1.5;
    GrowthOptions opt;
};

json growth_json(const GrowthReport& r) {
    json pa = json::array();
    for (const auto& a : r.per_alpha) pa.push_back(json::array({a.alpha, a.rate}));
    return json{{"p", r.p},
                {"bounds", {{"lower", jnum(r.lower_index_bound)}, {"upper", jnum(r.upper_index_bound)}}},
                {"transition", r.empirical_transition},
                {"bracket", json::array({r.bracket_lo, r.bracket_hi})},
                {"per_alpha", pa}};
}

int cmd_growth(const Common& c, const GrowthFlags& f) {
    const InitialMeasure mu = parse_measure(c.measure);
    const GrowthReport r = empirical_growth_index(mu, c.nu, c.lambda, {f.alpha_lo, f.alpha_hi}, f.opt);
    const Output out(c.out);
    const json j = growth_json(r);
    // the report is always JSON; csv adds the per-alpha table
    out.open("growth.json") << j.dump(2) << '\n';
    if (c.format == "csv") {
        auto os = out.open("growth.csv");
        os << "alpha,rate,residual\n";
        for (const auto& a : r.per_alpha) os << format_double(a.alpha) << ',' << format_double(a.rate) << ',' << format_double(a.residual) << '\n';
    }
    std::cout << j.dump(2) << '\n';
    json cfg = common_json(c);
    cfg["alpha_lo"] = f.alpha_lo;
    cfg["alpha_hi"] = f.alpha_hi;
    cfg["t_max"] = f.opt.t_max;
    cfg["fit_points"] = f.opt.fit_points;
    cfg["grid_points"] = f.opt.grid_points;
    cfg["resolution"] = f.opt.resolution;
    cfg["scan_points"] = f.opt.scan_points;
    out.manifest("growth", c.seed, cfg);
    return kOk;
}

struct SimulateFlags {
    SimFlags sim;
    std::vector<double> t_probe, x_probe{0.0}, y_probe;
    std::size_t save_replicates = 1;
    bool field_csv = false;
};

int cmd_simulate(const Common& c, const SimulateFlags& f) {
    const InitialMeasure mu = parse_measure(c.measure);
    const SimConfig cfg = make_sim(c, f.sim);
    const Rho rho = make_rho(c, f.sim);
    const Output out(c.out);
    ProbeRecorder rec;
    struct Probe {
        std::size_t id;
        int p;
    };
    std::vector<Probe> probes;
    for (double t : or_default(f.t_probe, cfg.T))
        for (double x : f.x_probe) {
            const std::size_t id = rec.add_point(t, x);
            probes.push_back({id, 1});
            probes.push_back({id, 2});
            for (double y : f.y_probe) probes.push_back({rec.add_two_point(t, x, y), 2});
        }
    simulate(mu, rho, cfg, [&](const LatticeField& fld) {
        rec(fld);
        if (fld.replicate < f.save_replicates) {
            const std::string stem = "field_" + std::to_string(fld.replicate);
            auto b = out.open(stem + ".bin", true);
            write_snapshot(b, fld);
            if (f.field_csv) {
                auto os = out.open(stem + ".csv");
                write_field_csv(os, fld);
            }
        }
    });
    std::vector<MomentEstimate> est;
    for (const auto& p : probes) est.push_back(rec.estimate(p.id, p.p));
    if (c.format == "csv") {
        auto os = out.open("estimates.csv");
        write_estimate_csv(os, est);
    } else {
        json a = json::array();
        for (const auto& e : est) {
            json row{{"p", e.p}, {"t", e.t}, {"x", e.x}};
            if (e.two_point) row["y"] = e.y;
            row["mean"] = jnum(e.mean);
            row["stderr"] = jnum(e.std_error);
            row["M"] = e.M;
            row["t_offset"] = e.t_offset;
            row["x_offset"] = e.x_offset;
            a.push_back(row);
        }
        out.open("estimates.json") << a.dump(2) << '\n';
    }
    write_estimate_csv(std::cout, est);
    json m = common_json(c);
    m["simulation"] = sim_json(cfg);
    m["rho"] = rho.describe();
    m["t_probe"] = or_default(f.t_probe, cfg.T);
    m["x_probe"] = f.x_probe;
    m["y_probe"] = f.y_probe;
    m["save_replicates"] = f.save_replicates;
    m["first_step"] = "exact heat flow for densities, band-limited for atoms; noise from step 1";
    out.manifest("simulate", c.seed, m);
    return kOk;
}

struct HolderFlags {
    SimFlags sim;
    double t0 = 0.5;
    std::string direction = "space";
    std::optional<double> h_min, h_max;
    double x_span = 1.0;
};

int cmd_holder(const Common& c, HolderFlags f) {
    const InitialMeasure mu = parse_measure(c.measure);
    const Direction dir = f.direction == "time" ? Direction::time : Direction::space;
    SimFlags sf = f.sim;
    sf.x_query_max = std::max(sf.x_query_max, f.x_span);
    const SimConfig cfg = make_sim(c, sf);
    const double step = dir == Direction::space ? cfg.dx : cfg.dt * static_cast<double>(cfg.save_every);
    const HolderWindow w{f.h_min.value_or(dir == Direction::space ? step : 8 * step), f.h_max.value_or(dir == Direction::space ? 8 * step : 256 * step),
                         f.x_span};
    VariogramAccumulator acc(dir, f.t0, w);
    simulate(mu, make_rho(c, sf), cfg, acc);
    const HolderEstimate h = acc.estimate();
    const Output out(c.out);
    json j{{"direction", f.direction}, {"t0", f.t0}, {"exponent", h.exponent}, {"fit_residual", h.residual}, {"lags", h.lags},
           {"variogram", h.variogram}};
    if (c.format == "json") {
        out.open("holder.json") << j.dump(2) << '\n';
    } else {
        auto os = out.open("holder.csv");
        os << "lag,variogram\n";
        for (std::size_t i = 0; i < h.lags.size(); ++i) os << format_double(h.lags[i]) << ',' << format_double(h.variogram[i]) << '\n';
    }
    std::cout << "exponent=" << format_double(h.exponent) << " fit_residual=" << format_double(h.residual) << '\n';
    json m = common_json(c);
    m["simulation"] = sim_json(cfg);
    m["direction"] = f.direction;
    m["t0"] = f.t0;
    m["window"] = {{"h_min", w.h_min}, {"h_max", w.h_max}, {"x_span", w.x_span}};
    out.manifest("holder", c.seed, m);
    return kOk;
}

struct ValidateFlags {
    std::vector<std::string> only;
    bool quick = false;
};

std::string csv_quote(const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

int cmd_validate(const Common& c, const ValidateFlags& f, bool seed_given) {
    for (const auto& k : f.only) criterion_by_key(k);  // unknown keys are config errors
    const Output out(c.out);
    CampaignOptions opt;
    opt.quick = f.quick;
    if (seed_given) opt.seed = c.seed;  // otherwise the campaign's own fixed seed, same as the acceptance binary
    const auto results = run_campaign(opt, f.only, [](const CriterionResult& r) { std::cout << format_result_line(r) << std::endl; });
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    // runtimes vary between runs; they go to stdout only so the report files stay reproducible
    if (c.format == "csv") {
        auto os = out.open("validation.csv");
        os << "id,key,passed,quick,budget_seconds,measured\n";
        for (const auto& r : results)
            os << r.id << ',' << r.key << ',' << (r.passed ? "true" : "false") << ',' << (r.quick ? "true" : "false") << ','
               << format_double(r.budget_seconds) << ',' << csv_quote(r.measured) << '\n';
    } else {
        json a = json::array();
        for (const auto& r : results)
            a.push_back({{"id", r.id}, {"key", r.key}, {"title", r.title}, {"passed", r.passed}, {"quick", r.quick},
                         {"budget_seconds", r.budget_seconds}, {"measured", r.measured}});
        out.open("validation.json") << json{{"all_passed", all}, {"criteria", a}}.dump(2) << '\n';
    }
    json m = common_json(c);
    m["only"] = f.only;
    m["quick"] = f.quick;
    m["seed"] = opt.seed;
    out.manifest("validate", opt.seed, m);
    std::cout << (all ? "all selected criteria passed" : "some criteria FAILED") << '\n';
    return all ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"she: moments, growth indices and simulation of the stochastic heat equation"};
    app.set_version_flag("--version", std::string(SHE_VERSION));
    app.require_subcommand(1);

    Common common;
    MomentsFlags mf;
    TwoPointFlags tf;
    GrowthFlags gf;
    SimulateFlags sf;
    HolderFlags hf;
    ValidateFlags vf;

    auto* moments = app.add_subcommand("moments", "second moments and p-th moment bounds");
    add_common(moments, common);
    moments->add_option("--t", mf.t, "times (comma separated)")->delimiter(',')->capture_default_str();
    moments->add_option("--x", mf.x, "positions (comma separated)")->delimiter(',')->capture_default_str();
    moments->add_option("--p", mf.p, "even moment order")->capture_default_str();
    moments->add_option("--kind", mf.kind)->check(CLI::IsMember({"exact", "lower", "upper", "all"}))->capture_default_str();
    moments->add_flag("--quadrature", mf.quadrature, "force the general quadrature path");
    add_envelope(moments, mf.env);

    auto* twopoint = app.add_subcommand("twopoint", "two-point correlation E[u(t,x) u(t,y)]");
    add_common(twopoint, common);
    twopoint->add_option("--t", tf.t, "times (comma separated)")->delimiter(',')->capture_default_str();
    twopoint->add_option("--x", tf.x, "first points (comma separated)")->delimiter(',')->capture_default_str();
    twopoint->add_option("--y", tf.y, "second points (comma separated)")->delimiter(',')->capture_default_str();
    twopoint->add_option("--cache-nt", tf.cache_nt, "time nodes of the cached second-moment rows")->capture_default_str();
    twopoint->add_option("--cache-nx", tf.cache_nx, "space nodes of the cached rows")->capture_default_str();

    auto* growth = app.add_subcommand("growth", "empirical p = 2 growth-index transition");
    add_common(growth, common);
    growth->add_option("--alpha-lo", gf.alpha_lo, "lower end of the initial alpha bracket")->capture_default_str();
    growth->add_option("--alpha-hi", gf.alpha_hi, "upper end of the initial alpha bracket")->capture_default_str();
    growth->add_option("--t-max", gf.opt.t_max, "largest time of the log-moment fit")->capture_default_str();
    growth->add_option("--fit-points", gf.opt.fit_points, "fit times, equispaced on [t-max/2, t-max]")->capture_default_str();
    growth->add_option("--grid-points", gf.opt.grid_points, "points of the coarse alpha grid")->capture_default_str();
    growth->add_option("--resolution", gf.opt.resolution, "final bracket width in units of lambda^2")->capture_default_str();
    growth->add_option("--scan-points", gf.opt.scan_points, "scan points per ray before golden-section refinement")->capture_default_str();

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo lattice simulation");
    add_common(simulate_cmd, common);
    add_sim(simulate_cmd, sf.sim);
    simulate_cmd->add_option("--t-probe", sf.t_probe, "probe times (default T)")->delimiter(',');
    simulate_cmd->add_option("--x-probe", sf.x_probe, "probe positions")->delimiter(',')->capture_default_str();
    simulate_cmd->add_option("--y-probe", sf.y_probe, "second points for two-point estimates")->delimiter(',');
    simulate_cmd->add_option("--save-replicates", sf.save_replicates, "write the first k fields as SHE1 binaries")->capture_default_str();
    simulate_cmd->add_flag("--field-csv", sf.field_csv, "also write the saved fields as CSV");

    auto* holder = app.add_subcommand("holder", "Hoelder exponent from a simulated variogram");
    add_common(holder, common);
    hf.sim.M = 200;
    hf.sim.T = 0.66;
    hf.sim.L = 7.5;
    add_sim(holder, hf.sim);
    holder->add_option("--t0", hf.t0, "base time of the variogram")->capture_default_str();
    holder->add_option("--direction", hf.direction, "lag direction")->check(CLI::IsMember({"space", "time"}))->capture_default_str();
    holder->add_option("--h-min", hf.h_min, "smallest lag (default dx, or 8 dt)");
    holder->add_option("--h-max", hf.h_max, "largest lag (default 8 dx, or 256 dt)");
    holder->add_option("--x-span", hf.x_span, "base points satisfy |x| <= x-span")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "acceptance campaign");
    add_common(validate, common);
    validate->add_option("--only", vf.only, "criteria keys or ids, comma separated")->delimiter(',');
    validate->add_flag("--quick", vf.quick, "reduced replicate counts, wider bands");

    try {
        app.parse(argc, argv);
        CLI::App* sub = app.get_subcommands().front();
        if (!common.config.empty()) apply_config_file(sub, common.config);
        if (sub == moments) return cmd_moments(common, mf);
        if (sub == twopoint) return cmd_twopoint(common, tf);
        if (sub == growth) return cmd_growth(common, gf);
        if (sub == simulate_cmd) return cmd_simulate(common, sf);
        if (sub == holder) return cmd_holder(common, hf);
        return cmd_validate(common, vf, validate->get_option("--seed")->count() > 0);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    } catch (const Divergence& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kDivergence;
    } catch (const QuadratureFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kDivergence;
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
}
