#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "esta/schemes.hpp"

namespace esta {

// Natural units throughout: hbar = m = omega = 1, lengths in
// sigma = sqrt(hbar/(m omega)), energies in hbar*omega.

enum class HamKind { System, Idealized };

// Physical constants and conventions of one case study.
struct CaseModel {
    CaseId id = CaseId::SingleTransport;
    double a = 1e5;              // dimensionless trap depth U_0/(hbar omega)
    double d = 0.0;              // transport distance (sigma)
    double omega_carrier = 0.0;  // two-level carrier frequency (omega units)
    double C_tilde = 0.0;        // dimensionless Coulomb constant (two-ion)
    double mass = 1.0;           // effective mass in the trap argument: 1 or M = 2m = 2
    bool mu_zero = false;        // test hook: treat the system Hamiltonian as idealized

    double mu_s() const { return mu_zero ? 0.0 : 1.0 / a; }
    // Frequency of the idealized (transport) oscillator: omega for a single
    // particle, sqrt(2) omega for the two-ion centre of mass.
    double idealized_omega() const { return id == CaseId::TwoIon ? std::sqrt(2.0) : 1.0; }
};

CaseModel two_level_model(double omega_carrier, double a = 0.0);
CaseModel single_transport_model(double a, double d);
CaseModel two_ion_model(double a, double d, double C_tilde);

// --- Two-level Hamiltonian ------------------------------------------------

// H = (hbar/2) [[-delta, Omega (1 + e^{-2 i w t})], [Omega (1 + e^{+2 i w t}), delta]]
// for the system; the e^{+-2 i w t} terms are dropped for the idealized kind.
Eigen::Matrix2cd two_level_H(HamKind kind, const TwoLevelScheme& scheme, double omega_carrier,
                             double t);

// d H / d eps_k at lambda0 (1-based k = 1..8): k = 1..4 act on the Rabi
// frequency through the knot basis b_k, k = 5..8 on the detuning.
std::array<Eigen::Matrix2cd, 8> two_level_grad_H(HamKind kind, double t_f, double omega_carrier,
                                                 double t);

// --- Trap potentials --------------------------------------------------------

// Gaussian trap V_S(x) = a [1 - exp(-mass x^2 / (2a))]; saturates at the depth
// a and tends to the harmonic V_0(x) = mass x^2 / 2 as a -> infinity.
double gaussian_potential(double x, double a, double mass = 1.0);
double gaussian_potential_deriv(double x, double a, double mass = 1.0);

// Harmonic limit and its derivative.
double harmonic_potential(double x, double mass = 1.0);

// V_S - V_0 and its derivative (the mu-dependent gap).
double delta_potential(double x, double a, double mass = 1.0);
double delta_potential_deriv(double x, double a, double mass = 1.0);

// n-th Taylor coefficient of V_S in mu = 1/a at position x, with
// xi = mass x^2/2: H^(0) = xi, H^(1) = -xi^2/2, H^(2) = +xi^3/6.
// Orders n >= 3 are rejected.
double mu_expansion_term(int n, double x, double mass = 1.0);
double mu_expansion_term_deriv(int n, double x, double mass = 1.0);

// --- Two-ion case -----------------------------------------------------------

// Potentials on the (x_c, x_r) plane at trap position q0; x_r must be
// positive (distinguishable-ion ordering x_1 > x_2).
struct TwoIonPotentialValues {
    double system;
    double idealized;
};
TwoIonPotentialValues two_ion_potentials(double x_c, double x_r, double q0,
                                         const CaseModel& model);

// Stationary equilibrium distance of the relative potential
// M omega^2 x_r^2 + C/(2 x_r): r_eq = (C / (4 M omega^2))^{1/3}.
double equilibrium_distance(const CaseModel& model);

} // namespace esta
