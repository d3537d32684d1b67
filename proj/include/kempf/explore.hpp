#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kempf/balance.hpp"
#include "kempf/core.hpp"
#include "kempf/errors.hpp"
#include "kempf/lebrun.hpp"
#include "kempf/model.hpp"
#include "kempf/projective.hpp"

namespace kempf {

/// Knobs of a sampling or grid experiment. The seed is recorded in every
/// report; the radius is relative (weights are scaled by 1 + delta with
/// |delta| <= radius on a per-axis grid of `grid` values).
struct experiment_spec {
    std::size_t samples = 1;
    std::uint64_t seed = 0;
    int grid = 9;
    double radius = 0.1;
};

struct sample_row {
    std::size_t index = 0;
    std::string verdict;
    double residual = 0.0;
    double s_norm = 0.0;
    int iterations = 0;
    bool generic = false;
};

struct experiment_report {
    std::string kind;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t successes = 0;
    double success_fraction = 0.0;
    std::size_t generic_count = 0;
    double genericity_fraction = 0.0;
    bool has_genericity = false;
    double certified_radius = 0.0;
    bool has_certified_radius = false;
    std::vector<sample_row> rows;
    std::vector<std::size_t> failure_exemplars;
    double wall_clock_seconds = 0.0; // diagnostics only, never serialized
};

namespace detail {

/// Deterministic per-(seed, index) stream; uniform doubles are built from
/// the raw 64-bit engine output so results are identical across platforms.
class sample_rng {
  public:
    sample_rng(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Flat Dirichlet draw via normalized standard exponentials.
    Eigen::VectorXd dirichlet(int k) {
        Eigen::VectorXd e(k);
        for (int i = 0; i < k; ++i)
            e(i) = -std::log1p(-uniform01());
        return e / e.sum();
    }

  private:
    std::mt19937_64 engine_;
};

inline projective_point draw_point(const projective_torus_model& model, sample_rng& rng) {
    return projective_point(rng.dirichlet(model.dim()));
}

inline fiber_point draw_point(const lebrun_profile_model& model, sample_rng& rng) {
    const double margin = 1e-3 * (model.a_plus() - model.a_minus());
    return {rng.uniform(model.a_minus() + margin, model.a_plus() - margin), ""};
}

inline void record_failure(experiment_report& rep, std::size_t index) {
    if (rep.failure_exemplars.size() < 16)
        rep.failure_exemplars.push_back(index);
}

class stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

  private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

} // namespace detail

/// Scans a relative ball of weight vectors around the base configuration on
/// a per-axis grid and re-solves the balancing problem at every node. The
/// base configuration must pass all three conditions. Nodes whose scaled
/// weights are no longer positive count as INFEASIBLE failures; the report
/// carries the largest grid radius within which every node balanced.
template <symmetry_model M>
experiment_report certify_weight_openness(const M& model,
                                          const configuration<typename M::point_type>& config,
                                          const experiment_spec& spec,
                                          const solve_options& opt = {}) {
    if (!(spec.radius > 0.0))
        throw contract_error("certify_weight_openness: radius must be positive");
    if (spec.grid < 1)
        throw contract_error("certify_weight_openness: grid must be >= 1");
    const std::size_t n = config.size();
    const double nodes_est = std::pow(static_cast<double>(spec.grid), static_cast<double>(n));
    if (nodes_est > 2e5)
        throw contract_error("certify_weight_openness: grid too large");

    const condition_report base = check_conditions(model, config, opt);
    if (!base.all())
        throw precondition_error("certify_weight_openness: base configuration fails conditions");

    detail::stopwatch timer;
    experiment_report rep;
    rep.kind = "weight_openness";
    rep.seed = spec.seed;
    rep.has_certified_radius = true;

    std::vector<double> factors(static_cast<std::size_t>(spec.grid), 1.0);
    if (spec.grid > 1)
        for (int i = 0; i < spec.grid; ++i)
            factors[static_cast<std::size_t>(i)] =
                1.0 - spec.radius + 2.0 * spec.radius * i / (spec.grid - 1);

    double worst_failure_level = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> odo(n, 0);
    for (bool done = false; !done;) {
        double level = 0.0;
        std::vector<double> weights(n);
        bool feasible = true;
        for (std::size_t j = 0; j < n; ++j) {
            const double f = factors[odo[j]];
            level = std::max(level, std::abs(f - 1.0));
            weights[j] = config.weights()[j] * f;
            feasible = feasible && weights[j] > 0.0;
        }

        sample_row row;
        row.index = rep.samples;
        if (feasible) {
            const auto sol = solve_balance(model, config.with_weights(weights), opt);
            row.verdict = std::string(to_string(sol.status));
            row.residual = sol.final_residual;
            row.s_norm = sol.s_star.norm();
            row.iterations = sol.newton_steps;
        } else {
            row.verdict = "INFEASIBLE";
        }

        ++rep.samples;
        if (row.verdict == "BALANCED") {
            ++rep.successes;
        } else {
            detail::record_failure(rep, row.index);
            worst_failure_level = std::min(worst_failure_level, level);
        }
        rep.rows.push_back(std::move(row));

        done = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (++odo[j] < factors.size()) {
                done = false;
                break;
            }
            odo[j] = 0;
        }
    }

    rep.success_fraction = static_cast<double>(rep.successes) / static_cast<double>(rep.samples);
    rep.certified_radius = spec.radius;
    if (std::isfinite(worst_failure_level)) {
        rep.certified_radius = 0.0;
        for (double f : factors) {
            const double level = std::abs(f - 1.0);
            if (level < worst_failure_level)
                rep.certified_radius = std::max(rep.certified_radius, level);
        }
    }
    rep.wall_clock_seconds = timer.seconds();
    return rep;
}

/// Draws random n-point configurations (flat Dirichlet coordinates on the
/// projective model, uniform interior heights on the profile model), flows
/// each toward its balanced orbit representative, and reports the balanced
/// fraction together with the fraction passing the genericity rank test.
template <symmetry_model M>
experiment_report sample_point_density(const M& model, const std::vector<double>& weights, int m,
                                       const experiment_spec& spec, const solve_options& opt = {}) {
    if (spec.samples < 1)
        throw contract_error("sample_point_density: need at least one sample");
    if (weights.empty())
        throw contract_error("sample_point_density: need at least one weight");

    detail::stopwatch timer;
    experiment_report rep;
    rep.kind = "point_density";
    rep.seed = spec.seed;
    rep.has_genericity = true;

    const std::size_t n = weights.size();
    for (std::size_t i = 0; i < spec.samples; ++i) {
        detail::sample_rng rng(spec.seed, i);

        configuration<typename M::point_type> config =
            [&] { // retry duplicate draws from the same stream; ties have measure zero
                for (int attempt = 0; attempt < 64; ++attempt) {
                    std::vector<typename M::point_type> points;
                    for (std::size_t j = 0; j < n; ++j)
                        points.push_back(detail::draw_point(model, rng));
                    try {
                        return configuration<typename M::point_type>::create(
                            model, m, std::move(points), weights, opt.point_tol);
                    } catch (const contract_error&) {
                        continue;
                    }
                }
                throw contract_error("sample_point_density: could not draw a distinct configuration");
            }();

        const auto sol = rebalance_orbit(model, config, opt);
        const bool generic = check_conditions(model, config, opt).genericity;

        sample_row row;
        row.index = i;
        row.verdict = std::string(to_string(sol.status));
        row.residual = sol.final_residual;
        row.s_norm = sol.s_star.norm();
        row.iterations = sol.newton_steps;
        row.generic = generic;

        ++rep.samples;
        if (sol.status == solve_status::balanced)
            ++rep.successes;
        else
            detail::record_failure(rep, i);
        if (generic)
            ++rep.generic_count;
        rep.rows.push_back(std::move(row));
    }

    rep.success_fraction = static_cast<double>(rep.successes) / static_cast<double>(rep.samples);
    rep.genericity_fraction =
        static_cast<double>(rep.generic_count) / static_cast<double>(rep.samples);
    rep.wall_clock_seconds = timer.seconds();
    return rep;
}

/// Classification of a two-point height pair on a profile model.
///   in_ap_witnessed: distinct interior heights; the flow balances the pair
///     for every choice of positive weights.
///   in_cal_m: equal interior heights; balancing forces both heights to
///     zero, which kills the spanning condition, so nothing is decided.
///   endpoint_case: at least one point sits on the zero or infinity section,
///     where the flow is frozen; with both points on the same section no
///     constant-scalar-curvature class exists at all.
enum class pair_class { in_ap_witnessed, in_cal_m, endpoint_case };

inline std::string_view to_string(pair_class c) {
    switch (c) {
    case pair_class::in_ap_witnessed: return "IN_AP_WITNESSED";
    case pair_class::in_cal_m: return "IN_CAL_M";
    case pair_class::endpoint_case: return "ENDPOINT_CASE";
    }
    return "UNKNOWN";
}

inline pair_class classify_lebrun_pair(const lebrun_profile_model& model, double z1, double z2,
                                       double tol = default_point_tol) {
    for (double z : {z1, z2})
        if (!std::isfinite(z) || z < model.a_minus() || z > model.a_plus())
            throw domain_error("classify_lebrun_pair: height outside [a_minus, a_plus]");
    const auto at_endpoint = [&](double z) {
        return z <= model.a_minus() + tol || z >= model.a_plus() - tol;
    };
    if (at_endpoint(z1) || at_endpoint(z2))
        return pair_class::endpoint_case;
    if (std::abs(z1 - z2) <= tol)
        return pair_class::in_cal_m;
    return pair_class::in_ap_witnessed;
}

} // namespace kempf
