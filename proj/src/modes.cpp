#include "esta/modes.hpp"

#include <cmath>

#include "esta/errors.hpp"
#include "esta/propagators.hpp"

namespace esta {

TwoLevelModes two_level_modes(const TwoLevelScheme& baseline, double t_f,
                              const std::vector<double>& times, double max_substep) {
    if (max_substep <= 0.0) max_substep = t_f / 2048.0;
    TwoLevelModes modes;
    modes.times = times;
    modes.chi0.reserve(times.size());
    modes.chi1.reserve(times.size());

    auto hamiltonian = [&](double t) {
        return two_level_H(HamKind::Idealized, baseline, 0.0, t);
    };

    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    double t_prev = 0.0;
    for (double t : times) {
        if (t < t_prev - 1e-12 * t_f || t > t_f + 1e-12 * t_f)
            throw DomainError("two_level_modes: times must be ascending within [0, t_f]");
        u = propagate_two_level_matrix(hamiltonian, u, t_prev, t, max_substep);
        modes.chi0.push_back(u.col(0));
        modes.chi1.push_back(u.col(1));
        t_prev = t;
    }
    return modes;
}

TransportModes::TransportModes(TransportTrajectory baseline, double mass, double omega,
                               int gh_nodes)
    : traj_(std::move(baseline)), mass_(mass), omega_(omega),
      scale_(std::sqrt(mass * omega)), gh_nodes_(gh_nodes) {
    if (!(mass > 0.0) || !(omega > 0.0))
        throw DomainError("TransportModes: mass and omega must be positive");
    if (gh_nodes_ < 4) throw DomainError("TransportModes: too few Gauss-Hermite nodes");
}

double TransportModes::phase(int n, double t) const {
    if (n < 0) throw DomainError("TransportModes::phase: negative mode index");
    if (t == 0.0) return 0.0;
    const double energy = omega_ * (n + 0.5);
    // The integrand is a polynomial in t of degree <= 2*deg(qc); a 32-point
    // Gauss-Legendre rule is exact for the degree-9 design.
    const QuadratureRule& rule = gauss_legendre(32);
    double acc = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) {
        const double u = 0.5 * t * (1.0 + rule.nodes[i]);
        const double qd = traj_.qc_dot(u);
        const double qdd = traj_.qc_ddot(u);
        const double integrand = energy + 0.5 * mass_ * qd * qd + mass_ * qdd * traj_.qc(u) +
                                 0.5 * mass_ * qdd * qdd / (omega_ * omega_);
        acc += 0.5 * t * rule.weights[i] * integrand;
    }
    return -acc;
}

} // namespace esta
