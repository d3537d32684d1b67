#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "kempf/core.hpp"
#include "kempf/errors.hpp"
#include "kempf/model.hpp"

namespace kempf {

/// Point of a ruled surface in the LeBrun family, reduced to the data the
/// single circle action sees: its moment height, plus an opaque label for
/// the fiber/base position. The label never enters any formula; it only
/// decides point identity, so two points on different fibers stay distinct
/// even at equal heights.
struct fiber_point {
    double height = 0.0;
    std::string base;
};

/// Height model of a cscK surface carrying one Hamiltonian Killing field.
/// The moment height ranges over [a_minus, a_plus] with a_minus < 0 < a_plus
/// (the height averages to zero over the manifold), and the field strength
/// along a level set is a profile psi >= 0 vanishing exactly at the two
/// endpoints, which are the zero and infinity sections.
///
/// The flow integrates dz/dt = psi(z), so heights move monotonically toward
/// a_plus and the endpoints are fixed. The quadratic profile has a closed
/// logistic form; any other profile is integrated by a fixed-step RK4 scheme
/// with step 1e-3 * (a_plus - a_minus).
class lebrun_profile_model {
  public:
    using point_type = fiber_point;

    lebrun_profile_model(double a_minus, double a_plus, std::function<double(double)> profile)
        : lo_(a_minus), hi_(a_plus), psi_(std::move(profile)), logistic_(false) {
        if (!(lo_ < 0.0) || !(0.0 < hi_) || !std::isfinite(lo_) || !std::isfinite(hi_))
            throw contract_error("lebrun_profile_model: need a_minus < 0 < a_plus");
        if (!psi_)
            throw contract_error("lebrun_profile_model: profile must be callable");
    }

    /// psi(z) = (a_plus - z)(z - a_minus)/(a_plus - a_minus); equals
    /// (1 - z^2)/2 on [-1, 1]. Flows in closed form.
    static lebrun_profile_model quadratic(double a_minus = -1.0, double a_plus = 1.0) {
        lebrun_profile_model m(a_minus, a_plus, [a_minus, a_plus](double z) {
            return (a_plus - z) * (z - a_minus) / (a_plus - a_minus);
        });
        m.logistic_ = true;
        return m;
    }

    /// psi(z) = (L/pi) sin(pi (z - a_minus)/L); exercises the RK4 flow path.
    static lebrun_profile_model sine(double a_minus = -1.0, double a_plus = 1.0) {
        const double span = a_plus - a_minus;
        return lebrun_profile_model(a_minus, a_plus, [a_minus, span](double z) {
            return span / M_PI * std::sin(M_PI * (z - a_minus) / span);
        });
    }

    double a_minus() const noexcept { return lo_; }
    double a_plus() const noexcept { return hi_; }
    double profile(double height) const { return psi_at(height); }

    int dim() const noexcept { return 1; }
    int point_dim() const noexcept { return 1; } // the height; the base label is identity only
    double kappa() const noexcept { return 1.0; }

    symmetry_basis basis() const { return symmetry_basis(1, {"euler"}); }

    moment_vector moment_at(const fiber_point& p) const {
        return moment_vector(Eigen::VectorXd::Constant(1, checked(p)));
    }

    Eigen::MatrixXd gram_at(const fiber_point& p) const {
        return Eigen::MatrixXd::Constant(1, 1, psi_at(checked(p)));
    }

    fiber_point flow(const fiber_point& p, const flow_parameter& s) const {
        const double t = scalar(s);
        const double z = checked(p);
        if (z == lo_ || z == hi_ || t == 0.0)
            return p;
        return {logistic_ ? logistic_height(z, t) : rk4_flow(z, t).first, p.base};
    }

    /// Potential with dK/ds = height(flow(p, s)); K(0) = 0 and K is convex
    /// because the flowed height is nondecreasing in s.
    double kempf_ness_at(const fiber_point& p, const flow_parameter& s) const {
        const double t = scalar(s);
        const double z = checked(p);
        if (z == lo_ || z == hi_)
            return z * t;
        if (logistic_) {
            const double span = hi_ - lo_;
            const double b = interior_logit(z);
            return lo_ * t + span * (softplus(t + b) - softplus(b));
        }
        return rk4_flow(z, t).second;
    }

    bool point_eq(const fiber_point& a, const fiber_point& b, double tol) const {
        return a.base == b.base && std::abs(checked(a) - checked(b)) <= tol;
    }

    Eigen::MatrixXd trivial_directions() const { return Eigen::MatrixXd(1, 0); }

  private:
    double checked(const fiber_point& p) const {
        if (!std::isfinite(p.height) || p.height < lo_ || p.height > hi_)
            throw domain_error("lebrun_profile_model: height outside [a_minus, a_plus]");
        return p.height;
    }

    static double scalar(const flow_parameter& s) {
        if (s.dim() != 1)
            throw contract_error("lebrun_profile_model: flow parameter must be one-dimensional");
        return s.coords()(0);
    }

    double psi_at(double z) const {
        return std::max(0.0, psi_(std::clamp(z, lo_, hi_)));
    }

    static double softplus(double x) {
        return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    }

    static double sigmoid(double x) {
        return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    }

    double interior_logit(double z) const {
        const double u = (z - lo_) / (hi_ - lo_);
        return std::log(u) - std::log1p(-u);
    }

    double logistic_height(double z, double t) const {
        return lo_ + (hi_ - lo_) * sigmoid(t + interior_logit(z));
    }

    // Joint fixed-step RK4 for (height, potential): dz = psi(z), dK = z.
    std::pair<double, double> rk4_flow(double z, double t) const {
        if (t == 0.0)
            return {z, 0.0};
        const double max_step = 1e-3 * (hi_ - lo_);
        const int steps = static_cast<int>(std::ceil(std::abs(t) / max_step));
        const double h = t / steps;
        double k_acc = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double f1 = psi_at(z);
            const double z2 = z + 0.5 * h * f1;
            const double f2 = psi_at(z2);
            const double z3 = z + 0.5 * h * f2;
            const double f3 = psi_at(z3);
            const double z4 = z + h * f3;
            const double f4 = psi_at(z4);
            k_acc += h / 6.0 * (z + 2.0 * z2 + 2.0 * z3 + z4);
            z = std::clamp(z + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4), lo_, hi_);
        }
        return {z, k_acc};
    }

    double lo_;
    double hi_;
    std::function<double(double)> psi_;
    bool logistic_;
};

} // namespace kempf
