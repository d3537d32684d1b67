#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <kempf/explore.hpp>
#include <kempf/io.hpp>

#include "support/oracles.hpp"

using namespace kempf;

namespace {

configuration<fiber_point> balanced_lebrun_pair(const lebrun_profile_model& model) {
    const double h = 1.0 / std::sqrt(2.0);
    return configuration<fiber_point>::create(model, 2, {{-h, "p1"}, {h, "p2"}}, {1.0, 1.0});
}

} // namespace

TEST_CASE("weight openness: the balanced pair certifies a 0.1 ball") {
    const auto model = lebrun_profile_model::quadratic();
    const auto config = balanced_lebrun_pair(model);
    experiment_spec spec;
    spec.radius = 0.1;
    spec.grid = 9;
    const auto rep = certify_weight_openness(model, config, spec);
    CHECK(rep.samples == 81);
    CHECK(rep.successes == 81);
    CHECK(rep.success_fraction == 1.0);
    CHECK(rep.certified_radius == 0.1);
    CHECK(rep.failure_exemplars.empty());

    // spot audit: recompute a few grid nodes directly
    oracles::rng rng(41);
    for (int audit = 0; audit < 10; ++audit) {
        const double f1 = 0.9 + 0.2 * rng.uniform_int(0, 8) / 8.0;
        const double f2 = 0.9 + 0.2 * rng.uniform_int(0, 8) / 8.0;
        const auto sol = solve_balance(model, config.with_weights({f1, f2}));
        CHECK(sol.status == solve_status::balanced);
        CHECK(sol.final_residual <= 1e-10);
    }
}

TEST_CASE("weight openness: infeasible factors shrink the certified radius") {
    const auto model = lebrun_profile_model::quadratic();
    const auto config = balanced_lebrun_pair(model);
    experiment_spec spec;
    spec.radius = 10.0;
    spec.grid = 9;
    const auto rep = certify_weight_openness(model, config, spec);
    CHECK(rep.samples == 81);
    // factors 1 + 10*k/4 for k = -4..4: five of nine leave the weight positive
    CHECK(rep.successes == 25);
    CHECK(rep.success_fraction == Catch::Approx(25.0 / 81.0));
    CHECK(rep.certified_radius == 0.0);
    bool saw_infeasible = false;
    for (const auto& row : rep.rows)
        saw_infeasible = saw_infeasible || row.verdict == "INFEASIBLE";
    CHECK(saw_infeasible);
}

TEST_CASE("weight openness: degenerate bases are rejected up front") {
    const auto model = lebrun_profile_model::quadratic();
    const auto config = configuration<fiber_point>::create(
        model, 2, {{1.0, "p1"}, {1.0, "p2"}}, {1.0, 1.0});
    CHECK_THROWS_AS(certify_weight_openness(model, config, experiment_spec{}),
                    precondition_error);

    experiment_spec bad;
    bad.radius = -1.0;
    CHECK_THROWS_AS(certify_weight_openness(model, balanced_lebrun_pair(model), bad),
                    contract_error);
    experiment_spec huge;
    huge.grid = 1000;
    CHECK_THROWS_AS(certify_weight_openness(model, balanced_lebrun_pair(model), huge),
                    contract_error);
}

TEST_CASE("point density: random projective triples almost always balance") {
    const projective_torus_model model(2);
    experiment_spec spec;
    spec.samples = 300;
    spec.seed = 42;
    const auto rep = sample_point_density(model, {1.0, 1.0, 1.0}, 2, spec);
    CHECK(rep.samples == 300);
    CHECK(rep.success_fraction >= 0.95);
    CHECK(rep.genericity_fraction >= 0.999);
    CHECK(rep.seed == 42);
}

TEST_CASE("point density: interior height pairs always balance") {
    const auto model = lebrun_profile_model::quadratic();
    experiment_spec spec;
    spec.samples = 500;
    spec.seed = 7;
    const auto rep = sample_point_density(model, {0.8, 2.5}, 2, spec);
    CHECK(rep.success_fraction == 1.0);
}

TEST_CASE("point density: reports are reproducible given the seed") {
    const projective_torus_model model(2);
    experiment_spec spec;
    spec.samples = 120;
    spec.seed = 99;
    const auto a = sample_point_density(model, {1.0, 1.0, 1.0}, 2, spec);
    const auto b = sample_point_density(model, {1.0, 1.0, 1.0}, 2, spec);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].verdict == b.rows[i].verdict);
        CHECK(a.rows[i].residual == b.rows[i].residual);
        CHECK(a.rows[i].s_norm == b.rows[i].s_norm);
        CHECK(a.rows[i].iterations == b.rows[i].iterations);
    }
    CHECK(io::dump_deterministic(io::to_json(a)) == io::dump_deterministic(io::to_json(b)));
}

TEST_CASE("point density: tightening the divergence bound never helps") {
    const projective_torus_model model(2);
    experiment_spec spec;
    spec.samples = 200;
    spec.seed = 5;
    solve_options strict;
    strict.divergence_norm = 0.5;
    const auto tight = sample_point_density(model, {1.0, 1.0, 1.0}, 2, spec, strict);
    const auto loose = sample_point_density(model, {1.0, 1.0, 1.0}, 2, spec);
    CHECK(tight.success_fraction <= loose.success_fraction);
}

TEST_CASE("pair classification over the height square") {
    const auto model = lebrun_profile_model::quadratic();
    CHECK(classify_lebrun_pair(model, -0.5, 0.2) == pair_class::in_ap_witnessed);
    CHECK(classify_lebrun_pair(model, 0.3, 0.3) == pair_class::in_cal_m);
    CHECK(classify_lebrun_pair(model, 1.0, 1.0) == pair_class::endpoint_case);
    CHECK(classify_lebrun_pair(model, -1.0, -1.0) == pair_class::endpoint_case);
    // touching either end section disables the flow argument
    CHECK(classify_lebrun_pair(model, -1.0, 0.3) == pair_class::endpoint_case);
    CHECK(classify_lebrun_pair(model, -1.0, 1.0) == pair_class::endpoint_case);
    // near-equal heights collapse within tolerance
    CHECK(classify_lebrun_pair(model, 0.3, 0.3 + 1e-14) == pair_class::in_cal_m);
    CHECK(classify_lebrun_pair(model, 0.3, 0.3 + 1e-6) == pair_class::in_ap_witnessed);
    CHECK_THROWS_AS(classify_lebrun_pair(model, -1.5, 0.0), domain_error);
    CHECK(std::string(to_string(pair_class::in_cal_m)) == "IN_CAL_M");
}

TEST_CASE("density sampling rejects empty inputs") {
    const projective_torus_model model(2);
    experiment_spec spec;
    spec.samples = 0;
    CHECK_THROWS_AS(sample_point_density(model, {1.0}, 2, spec), contract_error);
    spec.samples = 1;
    CHECK_THROWS_AS(sample_point_density(model, {}, 2, spec), contract_error);
}
