#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "snls/inequalities.hpp"
#include "snls/params.hpp"
#include "snls/solver.hpp"
#include "snls/sources.hpp"
#include "snls/support.hpp"

namespace snls {

using Json = nlohmann::ordered_json;

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON number, or a string sentinel for values JSON cannot carry.
inline Json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

inline Json json_complex(Complex z) { return Json::array({json_number(z.real()), json_number(z.imag())}); }

inline void dump_json_to(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                dump_json_to(it.value(), out, indent, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ", ";
                first = false;
                dump_json_to(v, out, indent, depth + 1);
            }
            out += "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

// Fixed key order (insertion order) and 17 significant digits for floats.
inline std::string dump_json(const Json& j) {
    std::string out;
    dump_json_to(j, out, 2, 0);
    out += "\n";
    return out;
}

// Writes through a temporary file in the same directory, then renames.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(os), "io_error", "cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        require(static_cast<bool>(os), "io_error", "failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), "missing_input", "cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Flat "key = value" lines; '#' starts a comment. Later keys override earlier ones.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    for (int lineno = 1; std::getline(is, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "parse_error", "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        require(!key.empty(), "parse_error", "line " + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline double parse_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    require(end != value.c_str() && trim(std::string(end)).empty() && std::isfinite(x), "parse_error",
            "key '" + key + "': cannot parse '" + value + "' as a real number");
    return x;
}

inline long parse_integer(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long x = std::strtol(value.c_str(), &end, 10);
    require(end != value.c_str() && trim(std::string(end)).empty(), "parse_error",
            "key '" + key + "': cannot parse '" + value + "' as an integer");
    return x;
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    return out;
}

struct RunConfig {
    ProblemSpec spec;
    SolveOptions opts;
    std::string solver = "picard";
};

inline RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    cfg.spec.source_kind = "zero";
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "dim_N") cfg.spec.domain.dim = static_cast<int>(parse_integer(key, value));
        else if (key == "r_inner") cfg.spec.domain.r_inner = parse_real(key, value);
        else if (key == "r_outer") cfg.spec.domain.r_outer = parse_real(key, value);
        else if (key == "n_nodes") cfg.spec.n_nodes = static_cast<std::size_t>(parse_integer(key, value));
        else if (key == "m") cfg.spec.m = parse_real(key, value);
        else if (key == "a") cfg.spec.a = parse_complex(value);
        else if (key == "b") cfg.spec.b = parse_complex(value);
        else if (key == "delta") cfg.spec.delta = parse_real(key, value);
        else if (key == "source_kind") cfg.spec.source_kind = value;
        else if (key == "source_params") cfg.spec.source_params = parse_real_list(key, value);
        else if (key == "damping") cfg.opts.damping = parse_real(key, value);
        else if (key == "tol") cfg.opts.tol = parse_real(key, value);
        else if (key == "max_iter") cfg.opts.max_iter = static_cast<int>(parse_integer(key, value));
        else if (key == "solver") cfg.solver = value;
        else throw Error("parse_error", "unknown config key '" + key + "'");
    }
    require(cfg.solver == "picard" || cfg.solver == "newton", "parse_error",
            "solver must be picard or newton, got '" + cfg.solver + "'");
    return cfg;
}

inline std::string complex_text(Complex z) { return format_double(z.real()) + "," + format_double(z.imag()); }

// Fully resolved configuration, echoed into every manifest.
inline Json config_json(const RunConfig& cfg) {
    Json params = Json::array();
    for (double p : cfg.spec.source_params) params.push_back(json_number(p));
    return Json{{"dim_N", cfg.spec.domain.dim},
                {"r_inner", json_number(cfg.spec.domain.r_inner)},
                {"r_outer", json_number(cfg.spec.domain.r_outer)},
                {"n_nodes", cfg.spec.n_nodes},
                {"m", json_number(cfg.spec.m)},
                {"a", complex_text(cfg.spec.a)},
                {"b", complex_text(cfg.spec.b)},
                {"delta", json_number(cfg.spec.delta)},
                {"source_kind", cfg.spec.source_kind},
                {"source_params", params},
                {"damping", json_number(cfg.opts.damping)},
                {"tol", json_number(cfg.opts.tol)},
                {"max_iter", cfg.opts.max_iter},
                {"solver", cfg.solver}};
}

inline std::string field_csv(const GridField& u) {
    std::string out = "r,re_u,im_u\n";
    for (std::size_t j = 0; j < u.size(); ++j)
        out += format_double(u.mesh.nodes[j]) + "," + format_double(u.values[j].real()) + "," +
               format_double(u.values[j].imag()) + "\n";
    return out;
}

// Reads a field CSV; the mesh is rebuilt from the first and last radius and
// the node count, and the listed radii must match it.
inline GridField parse_field_csv(const std::string& text, int dim) {
    std::istringstream is(text);
    std::string line;
    require(static_cast<bool>(std::getline(is, line)) && trim(line) == "r,re_u,im_u", "parse_error",
            "field CSV must start with header r,re_u,im_u");
    std::vector<double> r;
    std::vector<Complex> v;
    for (int lineno = 2; std::getline(is, line); ++lineno) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        require(std::getline(ss, a, ',') && std::getline(ss, b, ',') && std::getline(ss, c), "parse_error",
                "field CSV line " + std::to_string(lineno) + ": expected three columns");
        const std::string where = "line " + std::to_string(lineno);
        r.push_back(parse_real(where, trim(a)));
        v.emplace_back(parse_real(where, trim(b)), parse_real(where, trim(c)));
    }
    require(r.size() >= min_mesh_nodes, "parse_error", "field CSV has too few rows");
    const auto mesh = build_mesh({dim, r.front(), r.back()}, r.size());
    for (std::size_t j = 0; j < r.size(); ++j)
        require(std::abs(r[j] - mesh.nodes[j]) <= 1e-12 * std::max(1.0, mesh.domain.r_outer), "parse_error",
                "field CSV radii are not a uniform mesh");
    return GridField(mesh, std::move(v));
}

inline std::string region_csv(const std::vector<RegionPoint>& pts) {
    std::string out = "re_a,im_a,re_b,im_b,in_A,in_B,exists,unique\n";
    for (const auto& p : pts)
        out += format_double(p.a.real()) + "," + format_double(p.a.imag()) + "," + format_double(p.b.real()) + "," +
               format_double(p.b.imag()) + "," + (p.in_A ? "1" : "0") + "," + (p.in_B ? "1" : "0") + "," +
               (p.exists ? "1" : "0") + "," + (p.unique ? "1" : "0") + "\n";
    return out;
}

inline std::string profiles_csv(const EnergyProfiles& prof) {
    std::string out = "rho,E,b,m2,I,J\n";
    for (std::size_t j = 0; j < prof.size(); ++j)
        out += format_double(prof.rho[j]) + "," + format_double(prof.E[j]) + "," + format_double(prof.b[j]) + "," +
               format_double(prof.m2[j]) + "," + format_double(prof.I[j]) + "," + format_double(prof.J[j]) + "\n";
    return out;
}

inline Json to_json(const ConstantPack& p) {
    Json j;
    j["A_delta"] = p.A_delta ? Json(json_number(*p.A_delta)) : Json(nullptr);
    j["B"] = p.B ? Json(json_number(*p.B)) : Json(nullptr);
    j["L"] = json_number(p.L);
    j["M"] = json_number(p.M);
    j["L1"] = json_number(p.L1);
    j["M0"] = json_number(p.M0);
    j["M0_tilde"] = json_number(p.M0_tilde);
    j["delta_bound_exponent"] = json_number(p.delta_bound_exponent);
    return j;
}

inline Json to_json(const BoundReport& r) {
    return Json{{"lhs1", json_number(r.lhs1)}, {"rhs1", json_number(r.rhs1)}, {"pass1", r.pass1},
                {"lhs2", json_number(r.lhs2)}, {"rhs2", json_number(r.rhs2)}, {"pass2", r.pass2},
                {"c_bound", json_number(r.c_bound)},
                {"c_bound_status", r.c_bound_calibrated ? "calibrated" : "uncalibrated"}};
}

inline Json to_json(const IneqReport& r) {
    return Json{{"name", r.name},
                {"samples", r.samples},
                {"worst_slack", json_number(r.worst_slack)},
                {"worst_case", r.worst_case},
                {"empirical_constant", r.empirical_constant ? Json(json_number(*r.empirical_constant)) : Json()},
                {"extremal_ratio", r.extremal_ratio ? Json(json_number(*r.extremal_ratio)) : Json()},
                {"tolerance", json_number(r.tolerance)},
                {"pass", r.pass}};
}

}  // namespace snls
