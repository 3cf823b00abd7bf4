#pragma once

#include <Eigen/Dense>
#include <complex>

#include "esta/engine.hpp"

namespace esta {

// Perturbative fidelity and gradient expansions in mu = 1/a for the transport
// cases, used as an independent cross-check of the closed-form estimates and
// of the exact simulator:
//   F(mu)      ~ 1 + mu^2 F2 + mu^3 F3 + ...
//   grad F(mu) ~ mu gradF1 + mu^2 gradF2 + ...
// built from the matrix elements
//   alpha^(j)_{n,m}(t) = <chi_n| H^(j) |chi_m>,
//   beta^(j)_{n,m}(t)  = <chi_n| grad_lambda H^(j) |chi_m>.
// The two-level case has no printed mu-series and is validated against finite
// differences of the exact simulator instead.
class PerturbativeOracle {
public:
    explicit PerturbativeOracle(const TransportProblem& problem);

    // j in {1, 2} (plus j = 0 for beta); n, m >= 0.
    std::complex<double> alpha(int j, int n, int m, double t) const;
    Eigen::VectorXcd beta(int j, int n, int m, double t) const;

    // F^(2) = -Sum_{n<=N} |Int alpha^(1)_{n,0} dt|^2
    double F2(int N, const QuadOptions& opts = {}) const;

    // F^(3) ~ -2 Sum_n Re[(Int alpha^(1)_{n,0})^* (Int alpha^(2)_{n,0})]
    // (double-integral contributions only).
    double F3_approx(int N, const QuadOptions& opts = {}) const;

    // gradF^(1) = -2 Sum_n Re[(Int alpha^(1)_{n,0}) (Int beta^(0)_{n,0})^*]
    Eigen::VectorXd gradF1(int N, const QuadOptions& opts = {}) const;

    // gradF^(2) ~ -2 Sum_n Re[(Int beta^(1)_{n,0})^* (Int alpha^(1)_{n,0})
    //                        + (Int beta^(0)_{n,0})^* (Int alpha^(2)_{n,0})]
    Eigen::VectorXd gradF2_approx(int N, const QuadOptions& opts = {}) const;

    // Diagnostic scale of the neglected triple-time-integral contributions,
    // Sum_n |Int alpha^(1)_{n,0}|^3. Reported, never asserted.
    double neglected_triple_integral_proxy(int N, const QuadOptions& opts = {}) const;

    std::complex<double> alpha_integral(int j, int n, const QuadOptions& opts = {}) const;
    Eigen::VectorXcd beta_integral(int j, int n, const QuadOptions& opts = {}) const;

private:
    const TransportProblem& problem_;
    std::vector<Polynomial> basis_;
};

} // namespace esta
