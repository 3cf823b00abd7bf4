#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "esta/errors.hpp"
#include "esta/models.hpp"
#include "esta/quadrature.hpp"
#include "esta/schemes.hpp"

namespace esta {

// --- Two-level modes --------------------------------------------------------
//
// chi_n(t) = U_0(t, 0) chi_n(0) with chi_0(0) = (1,0)^T (initial state) and
// chi_1(0) = (0,1)^T (orthonormal completion), propagated exactly under the
// idealized Hamiltonian.

struct TwoLevelModes {
    std::vector<double> times;
    std::vector<Eigen::Vector2cd> chi0;
    std::vector<Eigen::Vector2cd> chi1;
};

// Propagates the orthonormal initial basis to each entry of `times`
// (ascending, within [0, t_f]) with a 4th-order Magnus integrator;
// `max_substep` bounds the internal step size.
TwoLevelModes two_level_modes(const TwoLevelScheme& baseline, double t_f,
                              const std::vector<double>& times, double max_substep = 0.0);

// --- Transport modes ----------------------------------------------------
//
// chi_n(x, t) = e^{i theta_n(t)} e^{i m qc_dot x} phi_n(x - q_c(t)) with the
// oscillator eigenfunctions phi_n of (mass, omega). Matrix elements of
// multiplicative operators reduce to
//   <chi_n(t)| A |chi_0(t)> = e^{i n omega t} Int phi_n(u) A(u + q_c(t)) phi_0(u) du
// because the boost phases cancel and the phases differ by -n omega t.

class TransportModes {
public:
    TransportModes(TransportTrajectory baseline, double mass, double omega, int gh_nodes = 64);

    const TransportTrajectory& trajectory() const { return traj_; }
    double mass() const { return mass_; }
    double omega() const { return omega_; }
    // Oscillator length of the idealized trap.
    double width() const { return 1.0 / scale_; }

    // <chi_n(t)| A(x) |chi_0(t)> for a real multiplicative A, by adaptive
    // Gauss-Hermite quadrature (node count doubled until stable to rel_tol).
    template <class F>
    std::complex<double> matrix_element(int n, F&& A, double t) const {
        return matrix_element_nm(n, 0, std::forward<F>(A), t);
    }

    // General <chi_n(t)| A(x) |chi_m(t)> = e^{i (n-m) omega t} Int phi_n A phi_m.
    template <class F>
    std::complex<double> matrix_element_nm(int n, int m, F&& A, double t) const;

    // Lewis-Riesenfeld phase theta_n(t), theta_n(0) = 0:
    //   theta_n'(t) = -[E_n + m qc_dot^2/2 + m qc_ddot qc + m qc_ddot^2/(2 omega^2)]
    // with E_n = omega (n + 1/2). Evaluated by Gauss-Legendre quadrature.
    double phase(int n, double t) const;

    // phi_n(u) phi_0(u)-weighted integral of f(u): Int phi_n(u) f(u) phi_0(u) du.
    template <class F>
    double oscillator_integral(int n, int m, F&& f) const;

    int gh_nodes() const { return gh_nodes_; }
    double rel_tol() const { return rel_tol_; }

private:
    TransportTrajectory traj_;
    double mass_;
    double omega_;
    double scale_; // sqrt(mass * omega)
    int gh_nodes_;
    int max_gh_nodes_ = 1024;
    double rel_tol_ = 1e-8;
};

// ---------------------------------------------------------------------------

template <class F>
double TransportModes::oscillator_integral(int n, int m, F&& f) const {
    // Int phi_n(x) f(x) phi_m(x) dx = Sum w_i h_n(y_i) h_m(y_i) f(y_i / s)
    // over the e^{-y^2} Gauss-Hermite rule, s = sqrt(mass * omega).
    auto evaluate = [&](int nodes, double& l1) {
        const QuadratureRule& rule = gauss_hermite(nodes);
        double acc = 0.0;
        l1 = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double y = rule.nodes[i];
            const double term = rule.weights[i] * hermite_normalized(n, y) *
                                hermite_normalized(m, y) * f(y / scale_);
            acc += term;
            l1 += std::abs(term);
        }
        return acc;
    };
    double l1 = 0.0;
    double prev = evaluate(gh_nodes_, l1);
    for (int nodes = 2 * gh_nodes_; nodes <= max_gh_nodes_; nodes *= 2) {
        const double cur = evaluate(nodes, l1);
        // The floor absorbs round-off cancellation, which scales with the L1
        // mass of the integrand rather than with the result (parity-zero
        // elements cancel to ~1e-11 of their mass). Results at the noise
        // level are clamped to an exact zero so downstream quadratures do
        // not chase round-off.
        if (std::abs(cur - prev) <= rel_tol_ * std::abs(cur) + 1e-10 * l1)
            return std::abs(cur) <= 1e-10 * l1 ? 0.0 : cur;
        prev = cur;
    }
    throw AccuracyError("TransportModes: Gauss-Hermite quadrature did not stabilize");
}

template <class F>
std::complex<double> TransportModes::matrix_element_nm(int n, int m, F&& A, double t) const {
    const double qc = traj_.qc(t);
    const double integral = oscillator_integral(n, m, [&](double u) { return A(u + qc); });
    const double phase_angle = (n - m) * omega_ * t;
    return std::polar(1.0, phase_angle) * integral;
}

} // namespace esta
