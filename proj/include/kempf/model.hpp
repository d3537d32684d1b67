#pragma once

#include <concepts>

#include <Eigen/Dense>

#include "kempf/core.hpp"

namespace kempf {

/// A manifold descriptor, as far as the balancing machinery is concerned.
///
/// Required behaviour, for all points p and finite flow parameters s, s':
///   - gram_at(p) is symmetric positive semidefinite; entry (j,k) is the
///     metric pairing g(X_j, X_k) of the basis fields at p.
///   - flow(p, 0) == p and flow(flow(p, s), s') == flow(p, s + s') (the
///     torus is abelian, so one-parameter flows compose additively).
///   - d/de moment_at(flow(p, e*e_k))_j at e = 0 equals kappa() * gram_at(p)_{jk};
///     kappa() is a fixed positive constant of the model's flow convention.
///   - kempf_ness_at(p, .) is convex with s-gradient moment_at(flow(p, s)).
///   - trivial_directions() returns an orthonormal d x k matrix spanning the
///     flow directions that act trivially (k may be zero).
template <class M>
concept symmetry_model = requires(const M m, const typename M::point_type& p,
                                  const flow_parameter& s, double tol) {
    typename M::point_type;
    { m.dim() } -> std::convertible_to<int>;
    { m.point_dim() } -> std::convertible_to<int>;
    { m.kappa() } -> std::convertible_to<double>;
    { m.basis() } -> std::convertible_to<symmetry_basis>;
    { m.moment_at(p) } -> std::convertible_to<moment_vector>;
    { m.gram_at(p) } -> std::convertible_to<Eigen::MatrixXd>;
    { m.flow(p, s) } -> std::convertible_to<typename M::point_type>;
    { m.point_eq(p, p, tol) } -> std::convertible_to<bool>;
    { m.kempf_ness_at(p, s) } -> std::convertible_to<double>;
    { m.trivial_directions() } -> std::convertible_to<Eigen::MatrixXd>;
};

/// Orthonormal basis of the complement of a model's trivial directions.
/// Solvers restrict every Newton step and eigenvalue test to this subspace.
inline Eigen::MatrixXd nontrivial_basis(const Eigen::MatrixXd& trivial) {
    const Eigen::Index d = trivial.rows();
    const Eigen::Index k = trivial.cols();
    if (k == 0)
        return Eigen::MatrixXd::Identity(d, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(trivial);
    Eigen::MatrixXd q = qr.householderQ();
    return q.rightCols(d - k);
}

} // namespace kempf
