#include "esta/models.hpp"

#include <cmath>

#include "esta/errors.hpp"

namespace esta {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

CaseModel two_level_model(double omega_carrier, double a) {
    if (!(omega_carrier > 0.0)) throw DomainError("two_level_model: omega_carrier must be positive");
    CaseModel m;
    m.id = CaseId::TwoLevel;
    m.omega_carrier = omega_carrier;
    m.a = a > 0 ? a : 1.0; // unused for this case
    return m;
}

CaseModel single_transport_model(double a, double d) {
    if (!(a > 0.0)) throw DomainError("single_transport_model: a must be positive");
    if (!(d >= 0.0)) throw DomainError("single_transport_model: d must be non-negative");
    CaseModel m;
    m.id = CaseId::SingleTransport;
    m.a = a;
    m.d = d;
    m.mass = 1.0;
    return m;
}

CaseModel two_ion_model(double a, double d, double C_tilde) {
    if (!(a > 0.0)) throw DomainError("two_ion_model: a must be positive");
    if (!(d >= 0.0)) throw DomainError("two_ion_model: d must be non-negative");
    if (!(C_tilde > 0.0)) throw DomainError("two_ion_model: C_tilde must be positive");
    CaseModel m;
    m.id = CaseId::TwoIon;
    m.a = a;
    m.d = d;
    m.C_tilde = C_tilde;
    m.mass = 2.0; // M = 2m
    return m;
}

Eigen::Matrix2cd two_level_H(HamKind kind, const TwoLevelScheme& scheme, double omega_carrier,
                             double t) {
    const double rabi = scheme.rabi(t);
    const double detuning = scheme.detuning(t);
    std::complex<double> coupling = rabi;
    if (kind == HamKind::System)
        coupling *= 1.0 + std::exp(-2.0 * kI * omega_carrier * t);
    Eigen::Matrix2cd h;
    h << -0.5 * detuning, 0.5 * coupling, 0.5 * std::conj(coupling), 0.5 * detuning;
    return h;
}

std::array<Eigen::Matrix2cd, 8> two_level_grad_H(HamKind kind, double t_f, double omega_carrier,
                                                 double t) {
    std::array<Eigen::Matrix2cd, 8> grad;
    std::complex<double> coupling = 1.0;
    if (kind == HamKind::System)
        coupling += std::exp(-2.0 * kI * omega_carrier * t);
    for (int k = 1; k <= 4; ++k) {
        const double b = knot_basis(k, 4, t_f)(t);
        Eigen::Matrix2cd h;
        h << 0.0, 0.5 * b * coupling, 0.5 * b * std::conj(coupling), 0.0;
        grad[k - 1] = h;
        Eigen::Matrix2cd hd;
        hd << -0.5 * b, 0.0, 0.0, 0.5 * b;
        grad[k + 3] = hd;
    }
    return grad;
}

double gaussian_potential(double x, double a, double mass) {
    if (!(a > 0.0)) throw DomainError("gaussian_potential: a must be positive");
    const double xi = 0.5 * mass * x * x;
    return a * (-std::expm1(-xi / a));
}

double gaussian_potential_deriv(double x, double a, double mass) {
    if (!(a > 0.0)) throw DomainError("gaussian_potential_deriv: a must be positive");
    const double xi = 0.5 * mass * x * x;
    return mass * x * std::exp(-xi / a);
}

double harmonic_potential(double x, double mass) { return 0.5 * mass * x * x; }

double delta_potential(double x, double a, double mass) {
    return gaussian_potential(x, a, mass) - harmonic_potential(x, mass);
}

double delta_potential_deriv(double x, double a, double mass) {
    return gaussian_potential_deriv(x, a, mass) - mass * x;
}

double mu_expansion_term(int n, double x, double mass) {
    const double xi = 0.5 * mass * x * x;
    switch (n) {
        case 0: return xi;
        case 1: return -0.5 * xi * xi;
        case 2: return xi * xi * xi / 6.0;
        default:
            throw DomainError("mu_expansion_term: unsupported order " + std::to_string(n));
    }
}

double mu_expansion_term_deriv(int n, double x, double mass) {
    const double xi = 0.5 * mass * x * x;
    const double xi_p = mass * x;
    switch (n) {
        case 0: return xi_p;
        case 1: return -xi * xi_p;
        case 2: return 0.5 * xi * xi * xi_p;
        default:
            throw DomainError("mu_expansion_term_deriv: unsupported order " + std::to_string(n));
    }
}

TwoIonPotentialValues two_ion_potentials(double x_c, double x_r, double q0,
                                         const CaseModel& model) {
    if (!(x_r > 0.0)) throw DomainError("two_ion_potentials: x_r must be positive");
    const double coulomb = model.C_tilde / (2.0 * x_r);
    const double yp = x_c + x_r - q0;
    const double ym = x_c - x_r - q0;
    TwoIonPotentialValues v;
    v.system = gaussian_potential(yp, model.a, model.mass) +
               gaussian_potential(ym, model.a, model.mass) + coulomb;
    v.idealized = harmonic_potential(yp, model.mass) + harmonic_potential(ym, model.mass) +
                  coulomb;
    return v;
}

double equilibrium_distance(const CaseModel& model) {
    if (!(model.C_tilde > 0.0) || !(model.mass > 0.0))
        throw DomainError("equilibrium_distance: C_tilde and mass must be positive");
    return std::cbrt(model.C_tilde / (4.0 * model.mass));
}

} // namespace esta
