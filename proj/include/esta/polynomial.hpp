#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace esta {

// Dense power-basis polynomial stored in the scaled variable s = t / t_end,
// so coefficients stay O(1) on [0, t_end] regardless of the time scale.
class Polynomial {
public:
    Polynomial() : coeffs_(Eigen::VectorXd::Zero(1)), t_end_(1.0) {}
    Polynomial(Eigen::VectorXd scaled_coeffs, double t_end);

    static Polynomial zero(double t_end) { return Polynomial(Eigen::VectorXd::Zero(1), t_end); }

    double operator()(double t) const;

    // k-th derivative with respect to t, evaluated at t.
    double derivative(double t, int order = 1) const;

    // The derivative as a polynomial over the same interval.
    Polynomial derivative_poly(int order = 1) const;

    // Exact definite integral over [t0, t1].
    double definite_integral(double t0, double t1) const;

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    double t_end() const { return t_end_; }
    const Eigen::VectorXd& scaled_coeffs() const { return coeffs_; }
    double max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator*(double c) const;

private:
    Eigen::VectorXd coeffs_; // p(t) = sum_k coeffs_[k] * (t/t_end)^k
    double t_end_;
};

// A single interpolation condition: d^order p / dt^order (t) == value.
struct PolyConstraint {
    double t;
    int order;
    double value;
};

// Unique polynomial of degree constraints.size()-1 through the given
// value/derivative constraints. Solved by QR with one step of iterative
// refinement; throws AccuracyError if the residual stays above tolerance.
Polynomial fit_polynomial(std::span<const PolyConstraint> constraints, double t_end);

} // namespace esta
