#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kempf/balance.hpp"
#include "kempf/core.hpp"
#include "kempf/errors.hpp"
#include "kempf/explore.hpp"
#include "kempf/lebrun.hpp"
#include "kempf/projective.hpp"
#include "kempf/sha256.hpp"
#include "kempf/version.hpp"

namespace kempf::io {

using json = nlohmann::json;
using any_model = std::variant<projective_torus_model, lebrun_profile_model>;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error("cannot read input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Parses JSON text; malformed input raises kempf::parse_error carrying a
/// 1-based line/column computed from the reported byte offset.
inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        offset = std::min(offset, text.size());
        int line = 1, column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::ostringstream msg;
        msg << "malformed JSON at line " << line << ", column " << column << ": " << e.what();
        throw parse_error(line, column, msg.str());
    }
}

namespace detail {

inline void require_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    if (!obj.is_object())
        throw schema_error(where, where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view k : allowed)
            known = known || item.key() == k;
        if (!known)
            throw schema_error(item.key(), "unknown key '" + item.key() + "' in " + where);
    }
}

inline const json& require_present(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw schema_error(key, where + " is missing required key '" + std::string(key) + "'");
    return *it;
}

inline double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw schema_error(where, where + " must be a number");
    return v.get<double>();
}

inline std::int64_t as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        throw schema_error(where, where + " must be an integer");
    return v.get<std::int64_t>();
}

inline std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string())
        throw schema_error(where, where + " must be a string");
    return v.get<std::string>();
}

} // namespace detail

/// Model descriptors:
///   {"type": "projective_torus", "m": 2}
///   {"type": "lebrun_profile", "a_minus": -1.0, "a_plus": 1.0, "profile": "quadratic"}
inline any_model model_from_json(const json& j) {
    if (!j.is_object())
        throw schema_error("model", "model must be a JSON object");
    const std::string type = detail::as_string(detail::require_present(j, "type", "model"),
                                               "model.type");
    if (type == "projective_torus") {
        detail::require_keys(j, {"type", "m"}, "model");
        const auto m = detail::as_integer(detail::require_present(j, "m", "model"), "model.m");
        if (m < 2)
            throw schema_error("m", "model.m must be >= 2");
        return projective_torus_model(static_cast<int>(m));
    }
    if (type == "lebrun_profile") {
        detail::require_keys(j, {"type", "a_minus", "a_plus", "profile"}, "model");
        const double lo =
            detail::as_number(detail::require_present(j, "a_minus", "model"), "model.a_minus");
        const double hi =
            detail::as_number(detail::require_present(j, "a_plus", "model"), "model.a_plus");
        std::string profile = "quadratic";
        if (j.contains("profile"))
            profile = detail::as_string(j.at("profile"), "model.profile");
        if (profile == "quadratic")
            return lebrun_profile_model::quadratic(lo, hi);
        if (profile == "sine")
            return lebrun_profile_model::sine(lo, hi);
        throw schema_error("profile", "model.profile must be 'quadratic' or 'sine'");
    }
    throw schema_error("type", "model.type must be 'projective_torus' or 'lebrun_profile'");
}

/// A parsed run document. Points are kept as raw JSON until a command binds
/// them to the concrete model's point type.
struct document {
    std::string bytes;
    json raw;
    any_model model;
    int complex_dim = 0;
    std::vector<double> weights;
    bool has_weights = false;
    bool has_points = false;
    solve_options options;
    experiment_spec spec;
};

inline document parse_run_document(std::string bytes) {
    json raw = parse_document(bytes);
    detail::require_keys(raw, {"model", "points", "weights", "m", "options"}, "document");
    any_model model = model_from_json(detail::require_present(raw, "model", "document"));

    int complex_dim = 0;
    const bool is_projective = std::holds_alternative<projective_torus_model>(model);
    if (raw.contains("m")) {
        const auto m = detail::as_integer(raw.at("m"), "m");
        if (m < 2)
            throw schema_error("m", "m must be >= 2");
        complex_dim = static_cast<int>(m);
        if (is_projective && complex_dim != std::get<projective_torus_model>(model).complex_dim())
            throw schema_error("m", "m disagrees with the model's complex dimension");
    } else if (is_projective) {
        complex_dim = std::get<projective_torus_model>(model).complex_dim();
    } else {
        throw schema_error("m", "document is missing required key 'm'");
    }

    document doc{std::move(bytes), std::move(raw), std::move(model), complex_dim,
                 {},               false,          false,            {},
                 {}};

    if (doc.raw.contains("weights")) {
        const json& w = doc.raw.at("weights");
        if (!w.is_array() || w.empty())
            throw schema_error("weights", "weights must be a nonempty array");
        for (std::size_t i = 0; i < w.size(); ++i)
            doc.weights.push_back(detail::as_number(w.at(i), "weights[" + std::to_string(i) + "]"));
        doc.has_weights = true;
    }
    doc.has_points = doc.raw.contains("points");

    if (doc.raw.contains("options")) {
        const json& o = doc.raw.at("options");
        detail::require_keys(o,
                             {"tol_res", "tol_pd", "tol_rank", "max_iter", "divergence_norm",
                              "point_tol", "seed", "samples", "radius", "grid"},
                             "options");
        if (o.contains("tol_res"))
            doc.options.tol_res = detail::as_number(o.at("tol_res"), "options.tol_res");
        if (o.contains("tol_pd"))
            doc.options.tol_pd = detail::as_number(o.at("tol_pd"), "options.tol_pd");
        if (o.contains("tol_rank"))
            doc.options.tol_rank = detail::as_number(o.at("tol_rank"), "options.tol_rank");
        if (o.contains("max_iter"))
            doc.options.max_iter =
                static_cast<int>(detail::as_integer(o.at("max_iter"), "options.max_iter"));
        if (o.contains("divergence_norm"))
            doc.options.divergence_norm =
                detail::as_number(o.at("divergence_norm"), "options.divergence_norm");
        if (o.contains("point_tol"))
            doc.options.point_tol = detail::as_number(o.at("point_tol"), "options.point_tol");
        if (o.contains("seed"))
            doc.spec.seed =
                static_cast<std::uint64_t>(detail::as_integer(o.at("seed"), "options.seed"));
        if (o.contains("samples")) {
            const auto v = detail::as_integer(o.at("samples"), "options.samples");
            if (v < 1)
                throw schema_error("samples", "options.samples must be >= 1");
            doc.spec.samples = static_cast<std::size_t>(v);
        }
        if (o.contains("radius"))
            doc.spec.radius = detail::as_number(o.at("radius"), "options.radius");
        if (o.contains("grid"))
            doc.spec.grid = static_cast<int>(detail::as_integer(o.at("grid"), "options.grid"));
    }
    return doc;
}

inline document load_document(const std::string& path) {
    return parse_run_document(read_file(path));
}

inline projective_point point_from_json(const projective_torus_model&, const json& v,
                                        const std::string& where) {
    if (!v.is_array() || v.size() < 2)
        throw schema_error(where, where + " must be an array of squared moduli");
    Eigen::VectorXd w(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k)
        w(static_cast<Eigen::Index>(k)) =
            detail::as_number(v.at(k), where + "[" + std::to_string(k) + "]");
    return projective_point(std::move(w));
}

inline fiber_point point_from_json(const lebrun_profile_model&, const json& v,
                                   const std::string& where) {
    if (v.is_number())
        return {v.get<double>(), ""};
    if (v.is_object()) {
        detail::require_keys(v, {"height", "base"}, where);
        fiber_point p{detail::as_number(detail::require_present(v, "height", where),
                                        where + ".height"),
                      ""};
        if (v.contains("base"))
            p.base = detail::as_string(v.at("base"), where + ".base");
        return p;
    }
    throw schema_error(where, where + " must be a height or an object {height, base}");
}

template <symmetry_model M>
configuration<typename M::point_type> configuration_from(const document& doc, const M& model) {
    if (!doc.has_points)
        throw schema_error("points", "document is missing required key 'points'");
    if (!doc.has_weights)
        throw schema_error("weights", "document is missing required key 'weights'");
    const json& pts = doc.raw.at("points");
    if (!pts.is_array() || pts.empty())
        throw schema_error("points", "points must be a nonempty array");
    std::vector<typename M::point_type> points;
    points.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        points.push_back(point_from_json(model, pts.at(i), "points[" + std::to_string(i) + "]"));
    return configuration<typename M::point_type>::create(model, doc.complex_dim, std::move(points),
                                                         doc.weights, doc.options.point_tol);
}

// ---------------------------------------------------------------------------
// Deterministic serialization: objects in sorted key order (nlohmann keeps
// them sorted), floating-point numbers with 17 significant digits so every
// double round-trips exactly.

namespace detail {

inline void dump_value(const json& v, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string pad_in(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& item : v.items()) {
            if (!first)
                out += ",\n";
            first = false;
            out += pad_in + json(item.key()).dump() + ": ";
            dump_value(item.value(), out, depth + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0)
                out += ",\n";
            out += pad_in;
            dump_value(v.at(i), out, depth + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float: {
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
        return;
    }
    default:
        out += v.dump();
        return;
    }
}

} // namespace detail

inline std::string dump_deterministic(const json& j) {
    std::string out;
    detail::dump_value(j, out, 0);
    out += "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Report conversion.

inline json to_json(const condition_report& rep) {
    return json{{"genericity",
                 {{"ok", rep.genericity}, {"rank", rep.moment_rank}, {"required_rank", rep.required_rank}}},
                {"balancing", {{"ok", rep.balancing}, {"residual", rep.balance_residual}}},
                {"general_position",
                 {{"ok", rep.general_position},
                  {"min_eigenvalue", rep.min_gram_eigenvalue},
                  {"threshold", rep.pd_threshold}}},
                {"all_hold", rep.all()},
                {"tolerances", {{"tol_res", rep.tol_res}, {"tol_pd", rep.tol_pd}}}};
}

inline json to_json(const projective_point& p) {
    return json(std::vector<double>(p.coords().data(),
                                    p.coords().data() + p.coords().size()));
}

inline json to_json(const fiber_point& p) {
    return json{{"height", p.height}, {"base", p.base}};
}

template <class Point>
json to_json(const solve_report<Point>& rep) {
    json points = json::array();
    for (const auto& p : rep.flowed_points)
        points.push_back(to_json(p));
    json j{{"status", std::string(to_string(rep.status))},
           {"s_star", std::vector<double>(rep.s_star.data(), rep.s_star.data() + rep.s_star.size())},
           {"flowed_points", std::move(points)},
           {"residual_history", rep.residual_history},
           {"newton_steps", rep.newton_steps},
           {"final_residual", rep.final_residual}};
    if (std::isfinite(rep.hessian_min_eig)) {
        j["hessian_min_eigenvalue"] = rep.hessian_min_eig;
        j["hessian_max_eigenvalue"] = rep.hessian_max_eig;
    }
    return j;
}

inline json to_json(const pair_heights& h) {
    return json{{"zeta1", h.z1}, {"zeta2", h.z2}};
}

/// Wall clock is intentionally not serialized; reports must be byte-stable
/// across reruns of the same document.
inline json to_json(const experiment_report& rep, bool include_rows = true) {
    json j{{"kind", rep.kind},
           {"seed", rep.seed},
           {"samples", rep.samples},
           {"successes", rep.successes},
           {"success_fraction", rep.success_fraction},
           {"failure_exemplars", rep.failure_exemplars}};
    if (rep.has_genericity) {
        j["generic_count"] = rep.generic_count;
        j["genericity_fraction"] = rep.genericity_fraction;
    }
    if (rep.has_certified_radius)
        j["certified_radius"] = rep.certified_radius;
    if (include_rows) {
        json rows = json::array();
        for (const auto& r : rep.rows) {
            json row{{"index", r.index},
                     {"verdict", r.verdict},
                     {"residual", r.residual},
                     {"s_norm", r.s_norm},
                     {"iterations", r.iterations}};
            if (rep.has_genericity)
                row["generic"] = r.generic;
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
    }
    return j;
}

inline json make_envelope(std::string_view command, const std::string& input_bytes, json report) {
    return json{{"tool", "kempf"},
                {"version", std::string(version)},
                {"command", std::string(command)},
                {"input_sha256", sha256::hex_digest(input_bytes)},
                {"report", std::move(report)}};
}

inline std::string to_csv(const experiment_report& rep) {
    std::string out = "index,verdict,residual,s_norm,iterations\n";
    char buf[128];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%d\n", r.index, r.verdict.c_str(),
                      r.residual, r.s_norm, r.iterations);
        out += buf;
    }
    return out;
}

} // namespace kempf::io
