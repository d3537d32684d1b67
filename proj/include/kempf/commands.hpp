#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>

#include "kempf/balance.hpp"
#include "kempf/explore.hpp"
#include "kempf/io.hpp"

namespace kempf::cli {

/// Flag values; unset optionals fall back to the document's options block,
/// then to built-in defaults.
struct options {
    std::string input_path;
    std::string output_path = "-";
    std::string csv_path;
    std::optional<double> tol_res;
    std::optional<double> tol_pd;
    std::optional<double> radius;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<int> grid;
};

namespace detail {

inline void apply_overrides(io::document& doc, const options& opt) {
    if (opt.tol_res)
        doc.options.tol_res = *opt.tol_res;
    if (opt.tol_pd)
        doc.options.tol_pd = *opt.tol_pd;
    if (opt.seed)
        doc.spec.seed = *opt.seed;
    if (opt.samples) {
        if (*opt.samples < 1)
            throw contract_error("--samples must be >= 1");
        doc.spec.samples = static_cast<std::size_t>(*opt.samples);
    }
    if (opt.radius)
        doc.spec.radius = *opt.radius;
    if (opt.grid)
        doc.spec.grid = *opt.grid;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw error("cannot write output file: " + path);
    f << text;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const precondition_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int exit_code(solve_status status) {
    switch (status) {
    case solve_status::balanced: return 0;
    case solve_status::diverged_unstable: return 3;
    default: return 4;
    }
}

inline const lebrun_profile_model& require_lebrun(const io::document& doc, const char* command) {
    if (!std::holds_alternative<lebrun_profile_model>(doc.model))
        throw schema_error("model",
                           std::string(command) + " requires a lebrun_profile model");
    return std::get<lebrun_profile_model>(doc.model);
}

inline void emit(const options& opt, std::string_view command, const io::document& doc,
                 io::json report, std::ostream& out) {
    write_output(opt.output_path, io::dump_deterministic(io::make_envelope(command, doc.bytes,
                                                                           std::move(report))),
                 out);
}

inline void emit_csv(const options& opt, const experiment_report& rep, std::ostream& err) {
    if (!opt.csv_path.empty())
        write_output(opt.csv_path, io::to_csv(rep), err);
}

} // namespace detail

inline int cmd_check(const options& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::document doc = io::load_document(opt.input_path);
        detail::apply_overrides(doc, opt);
        const condition_report rep = std::visit(
            [&](const auto& model) {
                return check_conditions(model, io::configuration_from(doc, model), doc.options);
            },
            doc.model);
        detail::emit(opt, "check", doc, io::to_json(rep), out);
        return rep.all() ? 0 : 2;
    });
}

inline int cmd_solve(const options& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::document doc = io::load_document(opt.input_path);
        detail::apply_overrides(doc, opt);
        return std::visit(
            [&](const auto& model) {
                const auto rep =
                    solve_balance(model, io::configuration_from(doc, model), doc.options);
                detail::emit(opt, "solve", doc, io::to_json(rep), out);
                return detail::exit_code(rep.status);
            },
            doc.model);
    });
}

inline int cmd_heights(const options& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::document doc = io::load_document(opt.input_path);
        detail::apply_overrides(doc, opt);
        const auto& model = detail::require_lebrun(doc, "heights");
        if (!doc.has_weights || doc.weights.size() != 2)
            throw schema_error("weights", "heights requires exactly two weights");
        const pair_heights h = balanced_pair_heights(model.a_minus(), model.a_plus(),
                                                     doc.weights[0], doc.weights[1],
                                                     doc.complex_dim);
        const double c1 = positive_power(doc.weights[0], doc.complex_dim - 1);
        const double c2 = positive_power(doc.weights[1], doc.complex_dim - 1);
        io::json rep = io::to_json(h);
        rep["weighted_sum_residual"] = c1 * h.z1 + c2 * h.z2;
        rep["a_minus"] = model.a_minus();
        rep["a_plus"] = model.a_plus();
        rep["m"] = doc.complex_dim;
        rep["weights"] = doc.weights;
        detail::emit(opt, "heights", doc, std::move(rep), out);
        return 0;
    });
}

inline int cmd_bisect(const options& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::document doc = io::load_document(opt.input_path);
        detail::apply_overrides(doc, opt);
        const auto& model = detail::require_lebrun(doc, "bisect");
        if (!doc.has_points)
            throw schema_error("points", "bisect requires two points");
        const io::json& pts = doc.raw.at("points");
        if (!pts.is_array() || pts.size() != 2)
            throw schema_error("points", "bisect requires exactly two points");
        if (!doc.has_weights || doc.weights.size() != 2)
            throw schema_error("weights", "bisect requires exactly two weights");
        const fiber_point p1 = io::point_from_json(model, pts.at(0), "points[0]");
        const fiber_point p2 = io::point_from_json(model, pts.at(1), "points[1]");
        const auto rep = bisect_two_points(model, p1.height, p2.height, doc.weights[0],
                                           doc.weights[1], doc.complex_dim, doc.options);
        detail::emit(opt, "bisect", doc, io::to_json(rep), out);
        return detail::exit_code(rep.status);
    });
}

inline int cmd_certify(const options& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::document doc = io::load_document(opt.input_path);
        detail::apply_overrides(doc, opt);
        return std::visit(
            [&](const auto& model) {
                const auto config = io::configuration_from(doc, model);
                const condition_report base = check_conditions(model, config, doc.options);
                if (!base.all()) {
                    io::json rep{{"error", "precondition_failed"},
                                 {"conditions", io::to_json(base)}};
                    detail::emit(opt, "certify", doc, std::move(rep), out);
                    return 2;
                }
                const experiment_report rep =
                    certify_weight_openness(model, config, doc.spec, doc.options);
                err << "# wall_clock_seconds " << rep.wall_clock_seconds << "\n";
                detail::emit(opt, "certify", doc, io::to_json(rep), out);
                detail::emit_csv(opt, rep, err);
                return 0;
            },
            doc.model);
    });
}

inline int cmd_sample(const options& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        io::document doc = io::load_document(opt.input_path);
        detail::apply_overrides(doc, opt);
        if (!doc.has_weights)
            throw schema_error("weights", "sample requires weights");
        return std::visit(
            [&](const auto& model) {
                const experiment_report rep = sample_point_density(
                    model, doc.weights, doc.complex_dim, doc.spec, doc.options);
                err << "# wall_clock_seconds " << rep.wall_clock_seconds << "\n";
                detail::emit(opt, "sample", doc, io::to_json(rep), out);
                detail::emit_csv(opt, rep, err);
                return 0;
            },
            doc.model);
    });
}

inline int run_command(const std::string& name, const options& opt, std::ostream& out,
                       std::ostream& err) {
    if (name == "check")
        return cmd_check(opt, out, err);
    if (name == "solve")
        return cmd_solve(opt, out, err);
    if (name == "heights")
        return cmd_heights(opt, out, err);
    if (name == "bisect")
        return cmd_bisect(opt, out, err);
    if (name == "certify")
        return cmd_certify(opt, out, err);
    if (name == "sample")
        return cmd_sample(opt, out, err);
    err << "error: unknown command '" << name << "'\n";
    return 1;
}

} // namespace kempf::cli
