#pragma once

#include <Eigen/Dense>
#include <vector>

namespace esta {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Gauss-Legendre rule on [-1, 1] (weight 1), Golub-Welsch via Eigen.
const QuadratureRule& gauss_legendre(int n);

// Gauss-Hermite rule for weight exp(-y^2) on the real line.
const QuadratureRule& gauss_hermite(int n);

// Nodes/weights of a composite Gauss-Legendre rule: `panels` equal panels
// over [a, b], `points` Gauss points per panel.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
CompositeRule composite_gauss_legendre(double a, double b, int panels, int points);

// Normalized Hermite value h_n(y) = H_n(y) / sqrt(2^n n! sqrt(pi)), so that
// the oscillator eigenfunction is phi_n(x) = sqrt(s) h_n(s x) exp(-(s x)^2/2)
// with s = sqrt(m * omega / hbar).
double hermite_normalized(int n, double y);

} // namespace esta
