#pragma once

#include <Eigen/Dense>

#include "esta/polynomial.hpp"

namespace esta {

enum class CaseId { TwoLevel, SingleTransport, TwoIon };

// Number of control components: 8 for the two-level case (4 Rabi knots +
// 4 detuning knots), 6 for the transport cases (interior trajectory knots).
int control_dimension(CaseId id);

// Control offsets epsilon relative to the STA baseline; the zero vector
// reproduces the baseline exactly.
struct ControlVector {
    Eigen::VectorXd values;

    int dimension() const { return static_cast<int>(values.size()); }
    static ControlVector zero(int dim) { return {Eigen::VectorXd::Zero(dim)}; }
};

// --- Two-level population inversion -------------------------------------

struct PulsePair {
    double rabi;     // Omega(t), angular frequency
    double detuning; // delta(t), angular frequency
};

// Baseline pulse pair, robust against systematic Rabi-frequency errors:
//   Omega(t) = (pi/t_f) sqrt(1 + 16 sin^6(pi t/t_f))
//   delta(t) = -8 (pi/t_f) sin(pi t/t_f) sin(2 pi t/t_f)
//              * [1 + 4 sin^6(pi t/t_f)] / [1 + 16 sin^6(pi t/t_f)]
// Gives exact population inversion under the idealized Hamiltonian.
PulsePair sta_pulse(double t, double t_f);

// Minimal (degree-5) polynomial vanishing at t = 0 and t = t_f with the four
// given values at the interior knots t = j t_f / 5, j = 1..4.
Polynomial correction_interpolant(const Eigen::Vector4d& knot_values, double t_f);

// Basis polynomial b_k (1-based k) for n_knots interior knots at
// t = j t_f/(n_knots+1): unit value at knot k, zero at the other knots and at
// both endpoints.
Polynomial knot_basis(int k, int n_knots, double t_f);

struct TwoLevelScheme {
    double t_f = 1.0;
    Polynomial f1; // Rabi-frequency correction, zero for the baseline
    Polynomial f2; // detuning correction

    double rabi(double t) const { return sta_pulse(t, t_f).rabi + f1(t); }
    double detuning(double t) const { return sta_pulse(t, t_f).detuning + f2(t); }
};

// --- Harmonic transport --------------------------------------------------

// Unique degree-9 polynomial with q_c(0)=0, q_c(t_f)=d and vanishing first
// through fourth derivatives at both endpoints.
Polynomial design_qc(double t_f, double d);

// Trap trajectory from the auxiliary equation qdd_c + omega0^2 (q_c - q_0) = 0,
// i.e. q_0 = q_c + qdd_c / omega0^2.
Polynomial q0_from_qc(const Polynomial& qc, double omega0);

struct TransportTrajectory {
    double t_f = 1.0;
    double d = 0.0;      // transport distance (units of sigma)
    double omega0 = 1.0; // trap frequency entering the auxiliary equation
    Polynomial qc;       // transported wavepacket center
    Polynomial q0_sta;   // baseline trap trajectory
    Polynomial correction; // g(eps; t), zero for the baseline

    double q0(double t) const { return q0_sta(t) + correction(t); }
    double qc_dot(double t) const { return qc.derivative(t, 1); }
    double qc_ddot(double t) const { return qc.derivative(t, 2); }
};

TransportTrajectory design_transport_sta(double t_f, double d, double omega0);

// --- Scheme construction (lambda = lambda0 + eps) ------------------------

// eps has 8 components: 1..4 shift the Rabi frequency through f1, 5..8 shift
// the detuning through f2.
TwoLevelScheme build_two_level_scheme(const ControlVector& eps, double t_f);

// eps has 6 components: q_0(lambda; t) = q_0^STA(t) + g(eps; t), where g is
// the minimal (degree-7) polynomial vanishing at the endpoints with
// g(j t_f/7) = eps_j.
TransportTrajectory build_transport_scheme(const ControlVector& eps, double t_f, double d,
                                           double omega0);

// Baseline control values lambda0 for the transport cases: q_0^STA at the
// interior knots j t_f/7. (For the two-level case lambda0 = 0 in the offset
// parameterization.)
Eigen::VectorXd transport_lambda0(const TransportTrajectory& sta);

} // namespace esta
