#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "she/errors.hpp"
#include "she/moment_calculus.hpp"
#include "she/spde_simulator.hpp"

namespace she {

// 17 significant digits: lossless for a CSV round trip.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One evaluated formula: formula_id, t, x, y, p, value, branch, tolerance_met (y and p may be empty).
struct FormulaRow {
    std::string formula_id;
    double t = 0.0, x = 0.0;
    std::optional<double> y;
    std::optional<int> p;
    double value = 0.0;
    std::string branch;
    bool tolerance_met = true;
};

inline void write_formula_csv(std::ostream& os, const std::vector<FormulaRow>& rows) {
    os << "formula_id,t,x,y,p,value,branch,tolerance_met\n";
    for (const auto& r : rows) {
        os << r.formula_id << ',' << format_double(r.t) << ',' << format_double(r.x) << ',' << (r.y ? format_double(*r.y) : "") << ','
           << (r.p ? std::to_string(*r.p) : "") << ',' << format_double(r.value) << ',' << r.branch << ','
           << (r.tolerance_met ? "true" : "false") << '\n';
    }
}

// Monte Carlo estimate rows: p, t, x, y, mean, stderr, M (y empty for one-point moments).
inline void write_estimate_csv(std::ostream& os, const std::vector<MomentEstimate>& rows) {
    os << "p,t,x,y,mean,stderr,M\n";
    for (const auto& e : rows)
        os << e.p << ',' << format_double(e.t) << ',' << format_double(e.x) << ',' << (e.two_point ? format_double(e.y) : "") << ','
           << format_double(e.mean) << ',' << format_double(e.std_error) << ',' << e.M << '\n';
}

// Field snapshot rows t, x, replicate, value.
inline void write_field_csv(std::ostream& os, const LatticeField& f, bool header = true) {
    if (header) os << "t,x,replicate,value\n";
    for (std::size_t r = 0; r < f.rows(); ++r) {
        const std::string t = format_double(f.t(r));
        for (std::size_t j = 0; j < f.nx; ++j)
            os << t << ',' << format_double(f.x(j)) << ',' << f.replicate << ',' << format_double(f.at(r, j)) << '\n';
    }
}

// ------------------------------------------------------------------ binary snapshots
// header {magic "SHE1", version u32, nx u64, nt u64, dx f64, dt f64, nu f64}, then nt*nx f64 row-major, all little-endian.
// dt is the spacing of the stored rows.

inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T> && (sizeof(T) == 4 || sizeof(T) == 8));
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u;
    std::memcpy(&u, &v, sizeof u);
    unsigned char b[sizeof u];
    for (std::size_t i = 0; i < sizeof u; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), sizeof b);
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    unsigned char b[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof b)) throw Error("snapshot: truncated file");
    U u = 0;
    for (std::size_t i = 0; i < sizeof b; ++i) u |= static_cast<U>(b[i]) << (8 * i);
    T v;
    std::memcpy(&v, &u, sizeof v);
    return v;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const LatticeField& f) {
    os.write("SHE1", 4);
    detail::put_le<std::uint32_t>(os, kSnapshotVersion);
    detail::put_le<std::uint64_t>(os, f.nx);
    detail::put_le<std::uint64_t>(os, f.rows());
    detail::put_le<double>(os, f.dx);
    detail::put_le<double>(os, f.dt * static_cast<double>(f.stride));
    detail::put_le<double>(os, f.nu);
    for (double v : f.values) detail::put_le<double>(os, v);
}

struct Snapshot {
    std::uint32_t version = 0;
    std::uint64_t nx = 0, nt = 0;
    double dx = 0.0, dt = 0.0, nu = 0.0;
    std::vector<double> values;
};

inline Snapshot read_snapshot(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "SHE1", 4) != 0) throw Error("snapshot: bad magic");
    Snapshot s;
    s.version = detail::get_le<std::uint32_t>(is);
    if (s.version != kSnapshotVersion) throw Error("snapshot: unsupported version " + std::to_string(s.version));
    s.nx = detail::get_le<std::uint64_t>(is);
    s.nt = detail::get_le<std::uint64_t>(is);
    s.dx = detail::get_le<double>(is);
    s.dt = detail::get_le<double>(is);
    s.nu = detail::get_le<double>(is);
    s.values.resize(s.nx * s.nt);
    for (double& v : s.values) v = detail::get_le<double>(is);
    return s;
}

}  // namespace she
