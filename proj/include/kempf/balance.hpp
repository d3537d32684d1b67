#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kempf/core.hpp"
#include "kempf/errors.hpp"
#include "kempf/lebrun.hpp"
#include "kempf/model.hpp"

namespace kempf {

struct solve_options {
    double tol_res = 1e-10;        // balancing residual norm
    double tol_pd = 1e-9;          // nondegeneracy, relative to max(1, trace)
    double tol_rank = 1e-9;        // singular-value cutoff, relative to max(1, sigma_max)
    int max_iter = 100;
    double divergence_norm = 50.0; // |s| beyond this is treated as an escape to infinity
    double armijo_slope = 1e-4;
    double point_tol = default_point_tol;
};

enum class solve_status { balanced, diverged_unstable, singular_jacobian, max_iter };

inline std::string_view to_string(solve_status s) {
    switch (s) {
    case solve_status::balanced: return "BALANCED";
    case solve_status::diverged_unstable: return "DIVERGED_UNSTABLE";
    case solve_status::singular_jacobian: return "SINGULAR_JACOBIAN";
    case solve_status::max_iter: return "MAX_ITER";
    }
    return "UNKNOWN";
}

/// Verdicts of the three admissibility conditions, each reported
/// independently of the others.
struct condition_report {
    bool genericity = false;   // moment vectors span the nontrivial dual space
    int moment_rank = 0;
    int required_rank = 0;
    bool balancing = false;    // weighted moment sum vanishes
    double balance_residual = 0.0;
    bool general_position = false; // weighted Gram sum nondegenerate
    double min_gram_eigenvalue = 0.0;
    double pd_threshold = 0.0;
    double tol_res = 0.0;
    double tol_pd = 0.0;

    bool all() const noexcept { return genericity && balancing && general_position; }
};

template <class Point>
struct solve_report {
    solve_status status = solve_status::max_iter;
    Eigen::VectorXd s_star;
    std::vector<Point> flowed_points;
    std::vector<double> residual_history;
    int newton_steps = 0;
    double final_residual = 0.0;
    // Condition diagnostics: spectrum bounds of the last reduced Hessian.
    double hessian_min_eig = std::numeric_limits<double>::quiet_NaN();
    double hessian_max_eig = std::numeric_limits<double>::quiet_NaN();
};

/// Weighted moment sum of the flowed configuration,
///   sum_j c_j * moment_at(flow(p_j, s)),
/// the map whose zeros are the balanced flow parameters.
template <symmetry_model M>
moment_vector flowed_moment_sum(const M& model, const configuration<typename M::point_type>& config,
                                const flow_parameter& s) {
    const effective_weights eff = effective_weights_of(config);
    std::vector<moment_vector> moments;
    moments.reserve(config.size());
    for (const auto& p : config.points())
        moments.push_back(model.moment_at(model.flow(p, s)));
    return weighted_moment_sum(moments, eff);
}

/// s-derivative of flowed_moment_sum: sum_j c_j * kappa * gram_at(flow(p_j, s)).
/// Symmetric positive semidefinite.
template <symmetry_model M>
Eigen::MatrixXd flowed_moment_jacobian(const M& model,
                                       const configuration<typename M::point_type>& config,
                                       const flow_parameter& s) {
    const effective_weights eff = effective_weights_of(config);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(model.dim(), model.dim());
    for (std::size_t k = 0; k < config.size(); ++k)
        j += eff.coeffs()(static_cast<Eigen::Index>(k)) * model.kappa() *
             model.gram_at(model.flow(config.points()[k], s));
    return j;
}

/// Summed potential F(s) = sum_j c_j * kempf_ness_at(p_j, s). Convex, with
/// gradient flowed_moment_sum and Hessian flowed_moment_jacobian; its
/// minimizers are exactly the balancing flow parameters.
template <symmetry_model M>
double total_kempf_ness(const M& model, const configuration<typename M::point_type>& config,
                        const flow_parameter& s) {
    const effective_weights eff = effective_weights_of(config);
    double f = 0.0;
    for (std::size_t k = 0; k < config.size(); ++k)
        f += eff.coeffs()(static_cast<Eigen::Index>(k)) *
             model.kempf_ness_at(config.points()[k], s);
    return f;
}

/// Checks, independently: (i) the moment vectors span the nontrivial dual
/// space, (ii) the weighted moment sum vanishes, (iii) no symmetry field is
/// killed by every point, i.e. the weighted Gram sum is positive definite on
/// the nontrivial subspace.
template <symmetry_model M>
condition_report check_conditions(const M& model,
                                  const configuration<typename M::point_type>& config,
                                  const solve_options& opt = {}) {
    const int d = model.dim();
    const Eigen::MatrixXd q = nontrivial_basis(model.trivial_directions());
    const effective_weights eff = effective_weights_of(config);
    const auto n = static_cast<Eigen::Index>(config.size());

    condition_report rep;
    rep.tol_res = opt.tol_res;
    rep.tol_pd = opt.tol_pd;

    Eigen::MatrixXd moments(d, n);
    Eigen::MatrixXd gram_sum = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& p = config.points()[static_cast<std::size_t>(j)];
        moments.col(j) = model.moment_at(p).coords();
        gram_sum += eff.coeffs()(j) * model.gram_at(p);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(moments);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma_cut = opt.tol_rank * std::max(1.0, sigma.size() > 0 ? sigma(0) : 0.0);
    rep.moment_rank = static_cast<int>((sigma.array() > sigma_cut).count());
    rep.required_rank = d - static_cast<int>(model.trivial_directions().cols());
    rep.genericity = rep.moment_rank == rep.required_rank;

    rep.balance_residual = (moments * eff.coeffs()).norm();
    rep.balancing = rep.balance_residual <= opt.tol_res;

    const Eigen::MatrixXd reduced = q.transpose() * gram_sum * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    rep.min_gram_eigenvalue = eig.eigenvalues().minCoeff();
    rep.pd_threshold = opt.tol_pd * std::max(1.0, reduced.trace());
    rep.general_position = rep.min_gram_eigenvalue > rep.pd_threshold;
    return rep;
}

/// Damped Newton minimization of the summed potential. Starts at s = 0 and
/// stops at the first of: residual below tol_res (balanced), |s| beyond the
/// divergence bound while still unbalanced (unstable orbit), a reduced
/// Hessian that is singular at the working tolerance, or the iteration cap.
template <symmetry_model M>
solve_report<typename M::point_type> solve_balance(const M& model,
                                                   const configuration<typename M::point_type>& config,
                                                   const solve_options& opt = {}) {
    const int d = model.dim();
    const Eigen::MatrixXd q = nontrivial_basis(model.trivial_directions());

    solve_report<typename M::point_type> rep;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d);

    for (int iter = 0;; ++iter) {
        const Eigen::VectorXd g = flowed_moment_sum(model, config, flow_parameter(s)).coords();
        const double residual = g.norm();
        rep.residual_history.push_back(residual);
        if (residual <= opt.tol_res) {
            rep.status = solve_status::balanced;
            break;
        }
        if (s.norm() > opt.divergence_norm) {
            rep.status = solve_status::diverged_unstable;
            break;
        }
        if (iter >= opt.max_iter) {
            rep.status = solve_status::max_iter;
            break;
        }

        const Eigen::MatrixXd reduced =
            q.transpose() * flowed_moment_jacobian(model, config, flow_parameter(s)) * q;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
        rep.hessian_min_eig = eig.eigenvalues().minCoeff();
        rep.hessian_max_eig = eig.eigenvalues().maxCoeff();
        if (rep.hessian_min_eig < opt.tol_pd * std::max(1.0, reduced.trace())) {
            rep.status = solve_status::singular_jacobian;
            break;
        }

        const Eigen::VectorXd g_reduced = q.transpose() * g;
        const Eigen::VectorXd step =
            -q * eig.eigenvectors() *
            (eig.eigenvalues().array().inverse() *
             (eig.eigenvectors().transpose() * g_reduced).array())
                .matrix();

        const double slope = g.dot(step); // negative: Newton direction on a convex potential
        const double f0 = total_kempf_ness(model, config, flow_parameter(s));
        // sufficient-decrease test, slackened by the resolution of the
        // potential itself so full Newton steps pass once decreases drop
        // below machine precision
        const double slack = 1e-14 * (1.0 + std::abs(f0));
        double t = 1.0;
        while (t > 1e-14) {
            const double ft = total_kempf_ness(model, config, flow_parameter(s + t * step));
            if (ft <= f0 + opt.armijo_slope * t * slope + slack)
                break;
            t *= 0.5;
        }
        s += t * step;
        ++rep.newton_steps;
    }

    rep.s_star = s;
    rep.final_residual = rep.residual_history.back();
    rep.flowed_points.reserve(config.size());
    for (const auto& p : config.points())
        rep.flowed_points.push_back(model.flow(p, flow_parameter(s)));
    return rep;
}

/// Flows a configuration to the balanced representative of its complexified
/// orbit. The solver core is solve_balance; the flowed points in the report
/// are the balanced configuration, and a diverged status marks orbits with
/// no balanced representative.
template <symmetry_model M>
solve_report<typename M::point_type> rebalance_orbit(const M& model,
                                                     const configuration<typename M::point_type>& config,
                                                     const solve_options& opt = {}) {
    return solve_balance(model, config, opt);
}

/// Balancing of two fiber points under the one-parameter flow, by bisection
/// on t -> c1 z1(t) + c2 z2(t). The residual is nondecreasing in t (its
/// derivative is sum_j c_j psi(z_j(t)) >= 0), so a sign-changing bracket
/// pins the unique root; when the residual never changes sign (for example
/// both points frozen on the same end section) the pair is unbalanceable.
inline solve_report<fiber_point> bisect_two_points(const lebrun_profile_model& model, double z1,
                                                   double z2, double a1, double a2, int m,
                                                   const solve_options& opt = {}) {
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw contract_error("bisect_two_points: weights must be positive");
    if (m < 2)
        throw contract_error("bisect_two_points: complex dimension must be >= 2");
    const fiber_point p1{z1, "p1"};
    const fiber_point p2{z2, "p2"};
    const double c1 = positive_power(a1, m - 1);
    const double c2 = positive_power(a2, m - 1);

    solve_report<fiber_point> rep;
    const auto residual_at = [&](double t) {
        const flow_parameter s(Eigen::VectorXd::Constant(1, t));
        return c1 * model.flow(p1, s).height + c2 * model.flow(p2, s).height;
    };
    const auto finish = [&](double t, solve_status status) {
        rep.status = status;
        rep.s_star = Eigen::VectorXd::Constant(1, t);
        const flow_parameter s(rep.s_star);
        rep.flowed_points = {model.flow(p1, s), model.flow(p2, s)};
        rep.final_residual = rep.residual_history.back();
        const Eigen::MatrixXd j =
            c1 * model.gram_at(rep.flowed_points[0]) + c2 * model.gram_at(rep.flowed_points[1]);
        rep.hessian_min_eig = rep.hessian_max_eig = j(0, 0);
        return rep;
    };

    double r0 = residual_at(0.0);
    rep.residual_history.push_back(std::abs(r0));
    if (std::abs(r0) <= opt.tol_res)
        return finish(0.0, solve_status::balanced);

    // Bracket by doubling away from zero, toward decreasing |residual|.
    constexpr double t_limit = 1024.0;
    double lo = 0.0, hi = 0.0;
    double r_lo = r0, r_hi = r0;
    if (r0 < 0.0) {
        hi = 1.0;
        while ((r_hi = residual_at(hi)) < 0.0 && hi < t_limit)
            hi *= 2.0;
        if (r_hi < 0.0)
            return finish(0.0, solve_status::diverged_unstable);
    } else {
        lo = -1.0;
        while ((r_lo = residual_at(lo)) > 0.0 && lo > -t_limit)
            lo *= 2.0;
        if (r_lo > 0.0)
            return finish(0.0, solve_status::diverged_unstable);
    }

    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double r_mid = residual_at(mid);
        rep.residual_history.push_back(std::abs(r_mid));
        ++rep.newton_steps;
        if (std::abs(r_mid) <= opt.tol_res)
            return finish(mid, solve_status::balanced);
        (r_mid < 0.0 ? lo : hi) = mid;
    }
    return finish(mid, solve_status::max_iter);
}

/// The two balanced heights a pair of weights can always be assigned on a
/// height interval [a_minus, a_plus]:
///   z1 = a_minus a_plus c2 / r,   z2 = -a_plus a_minus c1 / r,
/// with c_j = a_j^(m-1) and r = sqrt((a_minus c1)^2 + (a_plus c2)^2).
/// Satisfies c1 z1 + c2 z2 = 0 and a_minus < z1 < 0 < z2 < a_plus.
struct pair_heights {
    double z1 = 0.0;
    double z2 = 0.0;
};

inline pair_heights balanced_pair_heights(double a_minus, double a_plus, double a1, double a2,
                                          int m) {
    if (!(a_minus < 0.0) || !(0.0 < a_plus))
        throw contract_error("balanced_pair_heights: need a_minus < 0 < a_plus");
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw contract_error("balanced_pair_heights: weights must be positive");
    if (m < 2)
        throw contract_error("balanced_pair_heights: complex dimension must be >= 2");
    const double c1 = positive_power(a1, m - 1);
    const double c2 = positive_power(a2, m - 1);
    const double r = std::hypot(a_minus * c1, a_plus * c2);
    return {a_minus * a_plus * c2 / r, -a_plus * a_minus * c1 / r};
}

} // namespace kempf
