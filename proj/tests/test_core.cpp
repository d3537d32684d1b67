#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include <kempf/core.hpp>
#include <kempf/lebrun.hpp>
#include <kempf/projective.hpp>

#include "support/oracles.hpp"

using namespace kempf;

namespace {

moment_vector mv(std::initializer_list<double> entries) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (double e : entries)
        v(i++) = e;
    return moment_vector(std::move(v));
}

} // namespace

TEST_CASE("effective weights follow the exponent m-1") {
    const lebrun_profile_model model = lebrun_profile_model::quadratic();

    auto cfg = [&](int m, std::vector<double> weights) {
        std::vector<fiber_point> pts;
        for (std::size_t j = 0; j < weights.size(); ++j)
            pts.push_back({-0.5 + 0.3 * static_cast<double>(j), ""});
        return configuration<fiber_point>::create(model, m, pts, weights);
    };

    CHECK(effective_weights_of(cfg(2, {1.0, 1.0})).coeffs().isApprox(Eigen::Vector2d(1.0, 1.0)));
    CHECK((effective_weights_of(cfg(3, {2.0, 3.0})).coeffs() - Eigen::Vector2d(4.0, 9.0)).norm() ==
          0.0);
    // exact: 1.5^3 and 0.5^3 are representable
    CHECK((effective_weights_of(cfg(4, {1.5, 0.5})).coeffs() - Eigen::Vector2d(3.375, 0.125))
              .norm() == 0.0);
}

TEST_CASE("effective weights are monotone in each weight and match pow") {
    oracles::rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = rng.uniform_int(2, 6);
        const double a = rng.uniform(0.05, 5.0);
        const double b = a + rng.uniform(0.01, 2.0);
        CHECK(positive_power(a, m - 1) < positive_power(b, m - 1));
        CHECK(positive_power(a, m - 1) == Catch::Approx(std::pow(a, m - 1)).epsilon(1e-14));
    }
}

TEST_CASE("weighted moment sum: frozen examples") {
    const auto triple = std::vector<moment_vector>{
        mv({-1.0 / 3, -1.0 / 3}), mv({2.0 / 3, -1.0 / 3}), mv({-1.0 / 3, 2.0 / 3})};
    const auto sum = weighted_moment_sum(triple, effective_weights(Eigen::Vector3d(1, 1, 1)));
    CHECK(sum.coords().lpNorm<Eigen::Infinity>() <= 1e-15);

    const auto single = weighted_moment_sum({mv({0.5})},
                                            effective_weights(Eigen::VectorXd::Constant(1, 2.0)));
    CHECK(single.coords()(0) == 1.0);

    const double h = 1.0 / std::sqrt(2.0);
    const auto pair = weighted_moment_sum({mv({-h}), mv({h})},
                                          effective_weights(Eigen::Vector2d(1.0, 1.0)));
    CHECK(std::abs(pair.coords()(0)) <= 1e-16);
}

TEST_CASE("weighted moment sum is linear and degree-one homogeneous") {
    oracles::rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.uniform_int(1, 4);
        const int n = rng.uniform_int(1, 5);
        std::vector<moment_vector> ms, ms_scaled;
        Eigen::VectorXd c(n);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd v(d);
            for (int k = 0; k < d; ++k)
                v(k) = rng.uniform(-2.0, 2.0);
            ms.push_back(moment_vector(v));
            ms_scaled.push_back(moment_vector(2.0 * v));
            c(j) = rng.uniform(0.1, 3.0);
        }
        const double lambda = rng.uniform(0.1, 4.0);
        const auto base = weighted_moment_sum(ms, effective_weights(c));
        const auto scaled_w = weighted_moment_sum(ms, effective_weights(lambda * c));
        const auto scaled_m = weighted_moment_sum(ms_scaled, effective_weights(c));
        CHECK((scaled_w.coords() - lambda * base.coords()).norm() <= 1e-12 * (1 + base.norm()));
        CHECK((scaled_m.coords() - 2.0 * base.coords()).norm() <= 1e-12 * (1 + base.norm()));
    }
}

TEST_CASE("weighted moment sum rejects mismatched shapes") {
    CHECK_THROWS_AS(weighted_moment_sum({}, effective_weights(Eigen::VectorXd::Constant(1, 1.0))),
                    contract_error);
    CHECK_THROWS_AS(weighted_moment_sum({mv({1.0})},
                                        effective_weights(Eigen::Vector2d(1.0, 1.0))),
                    contract_error);
    CHECK_THROWS_AS(weighted_moment_sum({mv({1.0}), mv({1.0, 2.0})},
                                        effective_weights(Eigen::Vector2d(1.0, 1.0))),
                    contract_error);
}

TEST_CASE("value types reject non-finite entries") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(flow_parameter(Eigen::Vector2d(0.0, nan)), contract_error);
    CHECK_THROWS_AS(moment_vector(Eigen::Vector2d(inf, 0.0)), contract_error);
    CHECK_THROWS_AS(effective_weights(Eigen::Vector2d(1.0, -1.0)), contract_error);
    CHECK_NOTHROW(flow_parameter::zero(3));
}

TEST_CASE("symmetry basis validates labels") {
    CHECK_THROWS_AS(symmetry_basis(0, {}), contract_error);
    CHECK_THROWS_AS(symmetry_basis(2, {"a"}), contract_error);
    CHECK_THROWS_AS(symmetry_basis(2, {"a", "a"}), contract_error);
    CHECK(symmetry_basis(2, {"a", "b"}).dim() == 2);
}

TEST_CASE("configuration construction rejects every adversarial corruption") {
    const projective_torus_model proj(2);
    const lebrun_profile_model leb = lebrun_profile_model::quadratic();
    oracles::rng rng(13);

    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(2, 5);
        std::vector<projective_point> ppts;
        std::vector<fiber_point> lpts;
        std::vector<double> weights;
        for (int j = 0; j < n; ++j) {
            ppts.push_back(projective_point(rng.dirichlet(3)));
            lpts.push_back({rng.uniform(-0.99, 0.99), "f" + std::to_string(j)});
            weights.push_back(rng.uniform(0.1, 3.0));
        }
        CHECK_NOTHROW(configuration<projective_point>::create(proj, 2, ppts, weights));
        CHECK_NOTHROW(configuration<fiber_point>::create(leb, 2, lpts, weights));

        const int dup = rng.uniform_int(1, n - 1);
        auto dup_pts = ppts;
        dup_pts[static_cast<std::size_t>(dup)] = dup_pts[0];
        CHECK_THROWS_AS(configuration<projective_point>::create(proj, 2, dup_pts, weights),
                        contract_error);

        auto dup_l = lpts;
        dup_l[static_cast<std::size_t>(dup)] = dup_l[0];
        CHECK_THROWS_AS(configuration<fiber_point>::create(leb, 2, dup_l, weights),
                        contract_error);

        auto bad_w = weights;
        bad_w[static_cast<std::size_t>(rng.uniform_int(0, n - 1))] =
            trial % 2 == 0 ? 0.0 : -rng.uniform(0.1, 1.0);
        CHECK_THROWS_AS(configuration<projective_point>::create(proj, 2, ppts, bad_w),
                        contract_error);

        CHECK_THROWS_AS(configuration<projective_point>::create(proj, 1, ppts, weights),
                        contract_error);
        auto short_w = weights;
        short_w.pop_back();
        CHECK_THROWS_AS(configuration<projective_point>::create(proj, 2, ppts, short_w),
                        contract_error);
    }

    CHECK_THROWS_AS(configuration<fiber_point>::create(leb, 2, std::vector<fiber_point>{},
                                                       std::vector<double>{}),
                    contract_error);
}

TEST_CASE("with_weights keeps points and validates the new weights") {
    const lebrun_profile_model leb = lebrun_profile_model::quadratic();
    const auto base = configuration<fiber_point>::create(
        leb, 2, {{-0.5, ""}, {0.2, ""}}, {1.0, 1.0});
    const auto scaled = base.with_weights({2.0, 3.0});
    CHECK(scaled.weights() == std::vector<double>{2.0, 3.0});
    CHECK(scaled.points()[0].height == base.points()[0].height);
    CHECK_THROWS_AS(base.with_weights({1.0}), contract_error);
    CHECK_THROWS_AS(base.with_weights({1.0, 0.0}), contract_error);
}
