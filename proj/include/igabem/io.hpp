#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bench.hpp"
#include "error.hpp"
#include "geometry.hpp"

namespace igabem {

using json = nlohmann::json;

// Curve file:
//   {"degree": 2, "closed": false,
//    "breakpoints": [-1, 1], "multiplicities": [3, 3],   (or "knots": [...])
//    "control_points": [[-1, 0], [0, 2], [1, 0]]}
// Open curves default to clamped ends; closed curves use the cyclic layout and
// list one control point per logical basis function.

namespace detail {

inline void knots_to_breaks(const std::vector<double>& knots, std::vector<double>& br, std::vector<int>& mu) {
    for (double t : knots) {
        if (!br.empty() && t < br.back()) throw ConfigError("knot vector is not non-decreasing");
        if (!br.empty() && t == br.back())
            ++mu.back();
        else
            br.push_back(t), mu.push_back(1);
    }
}

}  // namespace detail

inline BoundaryCurve curve_from_json(const json& j) {
    try {
        const int d = j.at("degree").get<int>();
        const bool closed = j.value("closed", false);
        std::vector<double> br;
        std::vector<int> mu;
        if (j.contains("knots")) {
            if (closed) throw ConfigError("closed curves are given by breakpoints, not knots");
            detail::knots_to_breaks(j.at("knots").get<std::vector<double>>(), br, mu);
        } else {
            br = j.at("breakpoints").get<std::vector<double>>();
            if (j.contains("multiplicities")) mu = j.at("multiplicities").get<std::vector<int>>();
        }
        std::vector<Vec2> q;
        for (const auto& p : j.at("control_points")) {
            if (p.size() != 2) throw ConfigError("control points must be [x, y] pairs");
            q.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        BasisSpec B = closed ? make_cyclic_basis(d, br, mu) : make_open_basis(d, br, mu);
        return make_curve(B, q);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed curve description: ") + e.what());
    }
}

inline json curve_to_json(const BoundaryCurve& c) {
    json j;
    j["degree"] = c.basis.degree;
    j["closed"] = c.closed();
    j["breakpoints"] = c.basis.breaks;
    j["multiplicities"] = c.basis.mult;
    json pts = json::array();
    for (const auto& p : c.ctrl) pts.push_back({p.x(), p.y()});
    j["control_points"] = pts;
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline BoundaryCurve read_curve(const std::string& path) { return curve_from_json(read_json_file(path)); }

// Integer lists: "2", "2,3,5", "2:5" or a JSON array.
inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    auto to_int = [&](const std::string& t) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(t, &pos);
        } catch (const std::exception&) {
            throw ConfigError("not an integer: '" + t + "'");
        }
        if (pos != t.size()) throw ConfigError("not an integer: '" + t + "'");
        return v;
    };
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(to_int(item));
        } else {
            int lo = to_int(item.substr(0, colon)), hi = to_int(item.substr(colon + 1));
            if (hi < lo) throw ConfigError("empty range '" + item + "'");
            for (int k = lo; k <= hi; ++k) out.push_back(k);
        }
    }
    if (out.empty()) throw ConfigError("empty list '" + s + "'");
    return out;
}

// Mesh sizes: "1/5,1/10" or bare denominators "5,10".
inline std::vector<int> parse_h_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string den = item.rfind("1/", 0) == 0 ? item.substr(2) : item;
        for (int k : parse_int_list(den)) {
            if (k < 1) throw ConfigError("mesh size must be 1/k with k >= 1");
            out.push_back(k);
        }
    }
    if (out.empty()) throw ConfigError("empty mesh-size list");
    return out;
}

namespace detail {
inline std::vector<int> json_int_list(const json& v, bool h) {
    if (v.is_array()) {
        std::vector<int> out;
        for (const auto& e : v) {
            auto part = e.is_string() ? (h ? parse_h_list(e.get<std::string>()) : parse_int_list(e.get<std::string>()))
                                      : std::vector<int>{e.get<int>()};
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    if (v.is_string()) return h ? parse_h_list(v.get<std::string>()) : parse_int_list(v.get<std::string>());
    return {v.get<int>()};
}
}  // namespace detail

// Config file keys mirror the command-line flags.
inline void apply_config(const json& j, RunConfig& c) {
    static const char* known[] = {"problem", "curve",         "degree", "h",   "nref", "strategy", "ng",
                                  "b2_gauss", "geometry_mult", "symmetrize", "out", "dump_rules", "svg"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
            throw ConfigError("unknown config key '" + it.key() + "'");
    try {
        if (j.contains("problem")) c.problem = j["problem"].get<std::string>();
        if (j.contains("curve")) c.curve_file = j["curve"].get<std::string>();
        if (j.contains("degree")) c.degrees = detail::json_int_list(j["degree"], false);
        if (j.contains("h")) c.hinv = detail::json_int_list(j["h"], true);
        if (j.contains("nref")) c.nref = j["nref"].get<int>();
        if (j.contains("strategy")) c.strategy = j["strategy"].get<std::string>();
        if (j.contains("ng")) c.ng = j["ng"].get<int>();
        if (j.contains("b2_gauss")) c.b2_gauss = j["b2_gauss"].get<int>();
        if (j.contains("geometry_mult")) c.geometry_mult = j["geometry_mult"].get<int>();
        if (j.contains("symmetrize")) c.symmetrize = j["symmetrize"].get<bool>();
        if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
        if (j.contains("dump_rules")) c.dump_rules = j["dump_rules"].get<bool>();
        if (j.contains("svg")) c.svg = j["svg"].get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

inline void validate(const RunConfig& c) {
    if (c.degrees.empty() || c.hinv.empty()) throw ConfigError("degree and h lists must be non-empty");
    for (int d : c.degrees)
        if (d < 0 || d > kMaxDegree) throw ConfigError("degree out of range: " + std::to_string(d));
    if (c.nref < 1) throw ConfigError("nref must be >= 1");
    if (c.ng < 1) throw ConfigError("ng must be >= 1");
    if (c.b2_gauss < 1) throw ConfigError("b2_gauss must be >= 1");
    if (c.geometry_mult < 0) throw ConfigError("geometry_mult must be >= 0");
    if (c.strategy != "weighted" && c.strategy != "element")
        throw ConfigError("unknown strategy '" + c.strategy + "' (expected weighted or element)");
}

// Problem for a config: a registry name, or a custom curve file (closed curves
// get the interior problem with u = -(x1 + x2), open ones the exterior one).
inline Problem problem_for(const RunConfig& c) {
    if (c.curve_file.empty()) return define_problem(c.problem);
    BoundaryCurve curve = read_curve(c.curve_file);
    return curve.closed() ? direct_problem("custom", curve, 1) : indirect_problem("custom", curve);
}

inline json error_record(const std::exception& e) {
    json j;
    j["status"] = "error";
    if (const auto* ie = dynamic_cast<const Error*>(&e))
        j["kind"] = ie->kind();
    else
        j["kind"] = "internal";
    j["message"] = e.what();
    return j;
}

}  // namespace igabem
