#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kempf/errors.hpp"

namespace kempf {

inline constexpr double default_point_tol = 1e-12;

/// Basis of the torus part of the symmetry algebra. Each basis element is a
/// Hamiltonian Killing field, identified by its index; flows are parameterized
/// by the imaginary directions only, so the real dimension d is all we keep.
class symmetry_basis {
  public:
    symmetry_basis(int dim, std::vector<std::string> labels)
        : dim_(dim), labels_(std::move(labels)) {
        if (dim_ < 1)
            throw contract_error("symmetry_basis: dimension must be >= 1");
        if (labels_.size() != static_cast<std::size_t>(dim_))
            throw contract_error("symmetry_basis: need one label per basis element");
        std::vector<std::string> sorted = labels_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw contract_error("symmetry_basis: labels must be unique");
    }

    int dim() const noexcept { return dim_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

  private:
    int dim_;
    std::vector<std::string> labels_;
};

/// Coordinates of the imaginary-direction flow, in flow-time units.
class flow_parameter {
  public:
    explicit flow_parameter(Eigen::VectorXd s) : s_(std::move(s)) {
        if (!s_.allFinite())
            throw contract_error("flow_parameter: entries must be finite");
    }

    static flow_parameter zero(int dim) { return flow_parameter(Eigen::VectorXd::Zero(dim)); }

    const Eigen::VectorXd& coords() const noexcept { return s_; }
    int dim() const noexcept { return static_cast<int>(s_.size()); }

  private:
    Eigen::VectorXd s_;
};

/// Element of the dual symmetry algebra: the normalized Hamiltonian values
/// of one point, one entry per basis field.
class moment_vector {
  public:
    explicit moment_vector(Eigen::VectorXd v) : v_(std::move(v)) {
        if (!v_.allFinite())
            throw contract_error("moment_vector: entries must be finite");
    }

    const Eigen::VectorXd& coords() const noexcept { return v_; }
    int dim() const noexcept { return static_cast<int>(v_.size()); }
    double norm() const { return v_.norm(); }

  private:
    Eigen::VectorXd v_;
};

/// base^exponent by repeated multiplication; exponent >= 0.
inline double positive_power(double base, int exponent) {
    double out = 1.0;
    for (int k = 0; k < exponent; ++k)
        out *= base;
    return out;
}

/// The weights c_j = a_j^(m-1) that multiply the moment vectors in every
/// balancing sum.
class effective_weights {
  public:
    explicit effective_weights(Eigen::VectorXd c) : c_(std::move(c)) {
        if (c_.size() < 1 || !c_.allFinite() || (c_.array() <= 0.0).any())
            throw contract_error("effective_weights: entries must be positive and finite");
    }

    const Eigen::VectorXd& coeffs() const noexcept { return c_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(c_.size()); }

  private:
    Eigen::VectorXd c_;
};

/// n distinct model points with positive weights on a manifold of complex
/// dimension m >= 2. Distinctness is decided by the model's point-equality
/// predicate at construction time; instances are immutable afterwards.
template <class Point>
class configuration {
  public:
    template <class M>
    static configuration create(const M& model, int complex_dim, std::vector<Point> points,
                                std::vector<double> weights,
                                double point_tol = default_point_tol) {
        if (complex_dim < 2)
            throw contract_error("configuration: complex dimension must be >= 2");
        if (points.empty())
            throw contract_error("configuration: need at least one point");
        if (points.size() != weights.size())
            throw contract_error("configuration: one weight per point required");
        check_weights(weights);
        for (std::size_t a = 0; a + 1 < points.size(); ++a)
            for (std::size_t b = a + 1; b < points.size(); ++b)
                if (model.point_eq(points[a], points[b], point_tol))
                    throw contract_error("configuration: points must be pairwise distinct");
        return configuration(complex_dim, std::move(points), std::move(weights));
    }

    /// Same points, new weights. Point distinctness is unaffected.
    configuration with_weights(std::vector<double> weights) const {
        if (weights.size() != points_.size())
            throw contract_error("configuration: one weight per point required");
        check_weights(weights);
        return configuration(m_, points_, std::move(weights));
    }

    int complex_dim() const noexcept { return m_; }
    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<Point>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

  private:
    configuration(int m, std::vector<Point> points, std::vector<double> weights)
        : m_(m), points_(std::move(points)), weights_(std::move(weights)) {}

    static void check_weights(const std::vector<double>& weights) {
        for (double a : weights)
            if (!(a > 0.0) || !std::isfinite(a))
                throw contract_error("configuration: weights must be positive and finite");
    }

    int m_;
    std::vector<Point> points_;
    std::vector<double> weights_;
};

template <class Point>
effective_weights effective_weights_of(const configuration<Point>& config) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(config.size()));
    for (std::size_t j = 0; j < config.size(); ++j)
        c(static_cast<Eigen::Index>(j)) = positive_power(config.weights()[j], config.complex_dim() - 1);
    return effective_weights(std::move(c));
}

/// Sum_j c_j * moments[j]. Linear in each moment vector, homogeneous of
/// degree one in the weights.
inline moment_vector weighted_moment_sum(const std::vector<moment_vector>& moments,
                                         const effective_weights& eff) {
    if (moments.empty() || moments.size() != eff.size())
        throw contract_error("weighted_moment_sum: need equally many moments and weights");
    const Eigen::Index d = moments.front().coords().size();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (std::size_t j = 0; j < moments.size(); ++j) {
        if (moments[j].coords().size() != d)
            throw contract_error("weighted_moment_sum: moment vectors must share one dimension");
        sum += eff.coeffs()(static_cast<Eigen::Index>(j)) * moments[j].coords();
    }
    return moment_vector(std::move(sum));
}

} // namespace kempf
