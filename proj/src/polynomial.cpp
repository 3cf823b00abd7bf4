#include "esta/polynomial.hpp"

#include <cmath>

#include "esta/errors.hpp"

namespace esta {

Polynomial::Polynomial(Eigen::VectorXd scaled_coeffs, double t_end)
    : coeffs_(std::move(scaled_coeffs)), t_end_(t_end) {
    if (!(t_end_ > 0.0)) throw DomainError("Polynomial: interval length must be positive");
    if (coeffs_.size() == 0) coeffs_ = Eigen::VectorXd::Zero(1);
}

double Polynomial::operator()(double t) const {
    const double s = t / t_end_;
    double acc = 0.0;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) acc = acc * s + coeffs_[k];
    return acc;
}

double Polynomial::derivative(double t, int order) const {
    return derivative_poly(order)(t);
}

Polynomial Polynomial::derivative_poly(int order) const {
    if (order < 0) throw DomainError("Polynomial::derivative_poly: negative order");
    Eigen::VectorXd c = coeffs_;
    for (int rep = 0; rep < order; ++rep) {
        if (c.size() <= 1) {
            c = Eigen::VectorXd::Zero(1);
            break;
        }
        Eigen::VectorXd d(c.size() - 1);
        for (int k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k) / t_end_;
        c = std::move(d);
    }
    return Polynomial(std::move(c), t_end_);
}

double Polynomial::definite_integral(double t0, double t1) const {
    // Antiderivative in s, scaled back by t_end.
    Eigen::VectorXd c(coeffs_.size() + 1);
    c[0] = 0.0;
    for (int k = 0; k < coeffs_.size(); ++k) c[k + 1] = coeffs_[k] * t_end_ / static_cast<double>(k + 1);
    const Polynomial anti(std::move(c), t_end_);
    return anti(t1) - anti(t0);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    if (std::abs(t_end_ - other.t_end_) > 1e-12 * std::max(t_end_, other.t_end_))
        throw DomainError("Polynomial::operator+: mismatched intervals");
    const int n = std::max(coeffs_.size(), other.coeffs_.size());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c.head(coeffs_.size()) += coeffs_;
    c.head(other.coeffs_.size()) += other.coeffs_;
    return Polynomial(std::move(c), t_end_);
}

Polynomial Polynomial::operator*(double fac) const {
    return Polynomial(coeffs_ * fac, t_end_);
}

Polynomial fit_polynomial(std::span<const PolyConstraint> constraints, double t_end) {
    const int n = static_cast<int>(constraints.size());
    if (n == 0) throw DomainError("fit_polynomial: no constraints");
    if (!(t_end > 0.0)) throw DomainError("fit_polynomial: interval length must be positive");

    // Row i: d^o/ds^o s^k at s_i equals value_i * t_end^o.
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double s = constraints[i].t / t_end;
        const int o = constraints[i].order;
        if (o < 0) throw DomainError("fit_polynomial: negative derivative order");
        for (int k = 0; k < n; ++k) {
            double fac = 1.0;
            for (int j = 0; j < o; ++j) fac *= static_cast<double>(k - j);
            A(i, k) = (k >= o) ? fac * std::pow(s, k - o) : 0.0;
        }
        b[i] = constraints[i].value * std::pow(t_end, o);
    }

    const auto qr = A.colPivHouseholderQr();
    Eigen::VectorXd x = qr.solve(b);
    // One refinement pass pushes the constraint residual to round-off even for
    // the degree-9 boundary-value system.
    x += qr.solve(b - A * x);

    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    const double resid = (A * x - b).cwiseAbs().maxCoeff();
    if (!(resid <= 1e-9 * scale))
        throw AccuracyError("fit_polynomial: interpolation residual " + std::to_string(resid));
    return Polynomial(std::move(x), t_end);
}

} // namespace esta
