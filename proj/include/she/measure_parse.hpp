#pragma once

#include <cerrno>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "she/errors.hpp"
#include "she/initial_data.hpp"

namespace she {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string_view s, const std::string& context) {
    const std::string buf(trim(s));
    if (buf.empty()) throw ConfigError(context + ": missing number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v)) throw ConfigError(context + ": bad number '" + buf + "'");
    return v;
}

inline std::vector<double> parse_reals(std::string_view s, std::size_t expect, const std::string& context) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.push_back(parse_real(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start), context));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.size() != expect) throw ConfigError(context + ": expected " + std::to_string(expect) + " parameter(s), got " + std::to_string(out.size()));
    return out;
}

}  // namespace detail

// lebesgue | delta[:loc] | exp_decay:a | exp_growth:a,p | gaussian_bump:c,w | indicator:l,r | atoms:(loc,mass);(...)
inline InitialMeasure parse_measure(std::string_view spec) {
    spec = detail::trim(spec);
    const std::size_t colon = spec.find(':');
    const std::string name(detail::trim(spec.substr(0, colon)));
    const bool has_args = colon != std::string_view::npos;
    const std::string_view args = has_args ? spec.substr(colon + 1) : std::string_view{};
    const std::string ctx = "measure '" + std::string(spec) + "'";
    auto need_args = [&] {
        if (!has_args) throw ConfigError(ctx + ": missing parameters");
    };
    try {
        InitialMeasure mu;
        if (name == "lebesgue") {
            if (has_args) throw ConfigError(ctx + ": lebesgue takes no parameters");
            mu = InitialMeasure::lebesgue();
        } else if (name == "delta") {
            mu = InitialMeasure::dirac(has_args ? detail::parse_reals(args, 1, ctx)[0] : 0.0);
        } else if (name == "exp_decay") {
            need_args();
            mu = InitialMeasure::exp_decay(detail::parse_reals(args, 1, ctx)[0]);
        } else if (name == "exp_growth") {
            need_args();
            const auto v = detail::parse_reals(args, 2, ctx);
            mu = InitialMeasure::exp_growth(v[0], v[1]);
        } else if (name == "gaussian_bump") {
            need_args();
            const auto v = detail::parse_reals(args, 2, ctx);
            mu = InitialMeasure::gaussian_bump(v[0], v[1]);
        } else if (name == "indicator") {
            need_args();
            const auto v = detail::parse_reals(args, 2, ctx);
            mu = InitialMeasure::indicator(v[0], v[1]);
        } else if (name == "atoms") {
            need_args();
            std::vector<Atom> atoms;
            std::size_t pos = 0;
            while (pos < args.size()) {
                const std::string_view rest = detail::trim(args.substr(pos));
                if (rest.empty()) break;
                const std::size_t open = args.find('(', pos), close = args.find(')', pos);
                if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
                    !detail::trim(args.substr(pos, open - pos)).empty())
                    throw ConfigError(ctx + ": atoms must be written (loc,mass);(loc,mass);...");
                const auto v = detail::parse_reals(args.substr(open + 1, close - open - 1), 2, ctx);
                atoms.push_back({v[0], v[1]});
                pos = close + 1;
                const std::string_view tail = detail::trim(args.substr(pos));
                if (tail.empty()) break;
                if (tail.front() != ';') throw ConfigError(ctx + ": expected ';' between atoms");
                pos = args.find(';', pos) + 1;
            }
            if (atoms.empty()) throw ConfigError(ctx + ": no atoms given");
            mu = InitialMeasure::from_atoms(std::move(atoms));
        } else {
            throw ConfigError("unknown measure '" + name +
                              "' (expected lebesgue, delta[:loc], exp_decay:a, exp_growth:a,p, gaussian_bump:c,w, indicator:l,r, "
                              "atoms:(loc,mass);...)");
        }
        mu.set_name(std::string(spec));
        return mu;
    } catch (const InvalidArgument& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

}  // namespace she
