#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kempf/core.hpp"
#include "kempf/errors.hpp"
#include "kempf/model.hpp"

namespace kempf {

/// Point of complex projective m-space, reduced to what the torus sees:
/// the squared moduli of its m+1 homogeneous coordinates, normalized to
/// sum to one. Zero entries are allowed (coordinate subspaces and fixed
/// points are valid points); at least one entry must be positive.
class projective_point {
  public:
    explicit projective_point(Eigen::VectorXd w) : w_(std::move(w)) {
        if (w_.size() < 2 || !w_.allFinite())
            throw domain_error("projective_point: need >= 2 finite coordinates");
        if ((w_.array() < 0.0).any())
            throw domain_error("projective_point: coordinates must be nonnegative");
        const double total = w_.sum();
        if (!(total > 0.0))
            throw domain_error("projective_point: at least one coordinate must be positive");
        w_ /= total;
    }

    projective_point(std::initializer_list<double> w)
        : projective_point(Eigen::Map<const Eigen::VectorXd>(w.begin(),
                                                             static_cast<Eigen::Index>(w.size()))) {}

    /// Normalized squared moduli; entries sum to one.
    const Eigen::VectorXd& coords() const noexcept { return w_; }

  private:
    Eigen::VectorXd w_;
};

/// CP^m with the full coordinate torus acting. The symmetry dimension is
/// d = m+1, of which the constants direction acts trivially; solvers are
/// expected to project it out via trivial_directions().
///
/// With x = normalized squared moduli, the normalized Hamiltonians are
/// zeta_k = x_k - 1/(m+1) (their average over the manifold vanishes), the
/// Gram matrix is diag(x) - x x^T, and the complexified flow scales the
/// squared moduli by e^{2 s_k}.
class projective_torus_model {
  public:
    using point_type = projective_point;

    explicit projective_torus_model(int complex_dim) : m_(complex_dim) {
        if (complex_dim < 2)
            throw contract_error("projective_torus_model: complex dimension must be >= 2");
    }

    int complex_dim() const noexcept { return m_; }
    int dim() const noexcept { return m_ + 1; }
    int point_dim() const noexcept { return m_ + 1; } // squared moduli per point

    /// d(moment@flow)/ds = kappa * gram; the e^{2s} flow convention gives 2.
    double kappa() const noexcept { return 2.0; }

    symmetry_basis basis() const {
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(dim()));
        for (int k = 0; k < dim(); ++k)
            labels.push_back("t" + std::to_string(k));
        return symmetry_basis(dim(), std::move(labels));
    }

    moment_vector moment_at(const projective_point& p) const {
        const Eigen::VectorXd& x = checked(p);
        return moment_vector(x.array() - 1.0 / dim());
    }

    Eigen::MatrixXd gram_at(const projective_point& p) const {
        const Eigen::VectorXd& x = checked(p);
        Eigen::MatrixXd g = -x * x.transpose();
        g.diagonal() += x;
        return g;
    }

    projective_point flow(const projective_point& p, const flow_parameter& s) const {
        const Eigen::ArrayXd t = scaled_log(p, s);
        if (s.coords().isZero(0.0))
            return p; // exact identity, not just up to renormalization
        return projective_point((t - t.maxCoeff()).exp().matrix());
    }

    bool point_eq(const projective_point& a, const projective_point& b, double tol) const {
        return (checked(a) - checked(b)).lpNorm<Eigen::Infinity>() <= tol;
    }

    /// (1/2) log sum_k w_k e^{2 s_k} - (sum_k s_k)/(m+1). Convex in s with
    /// gradient moment_at(flow(p, s)); the log-sum-exp subtracts
    /// max_k(2 s_k + log w_k) before exponentiating.
    double kempf_ness_at(const projective_point& p, const flow_parameter& s) const {
        const Eigen::ArrayXd t = scaled_log(p, s);
        const double shift = t.maxCoeff();
        return 0.5 * (shift + std::log((t - shift).exp().sum())) - s.coords().sum() / dim();
    }

    Eigen::MatrixXd trivial_directions() const {
        return Eigen::MatrixXd::Constant(dim(), 1, 1.0 / std::sqrt(double(dim())));
    }

  private:
    const Eigen::VectorXd& checked(const projective_point& p) const {
        if (p.coords().size() != dim())
            throw domain_error("projective_torus_model: point has wrong coordinate count");
        return p.coords();
    }

    // 2 s_k + log w_k. log(0) = -inf entries exponentiate to exact zeros
    // after shifting, preserving the point's support.
    Eigen::ArrayXd scaled_log(const projective_point& p, const flow_parameter& s) const {
        const Eigen::VectorXd& w = checked(p);
        if (s.dim() != dim())
            throw contract_error("projective_torus_model: flow parameter has wrong dimension");
        return 2.0 * s.coords().array() + w.array().log();
    }

    int m_;
};

} // namespace kempf
