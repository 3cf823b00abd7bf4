#include "esta/schemes.hpp"

#include <cmath>
#include <vector>

#include "esta/errors.hpp"

namespace esta {

int control_dimension(CaseId id) {
    return id == CaseId::TwoLevel ? 8 : 6;
}

PulsePair sta_pulse(double t, double t_f) {
    if (!(t_f > 0.0)) throw DomainError("sta_pulse: t_f must be positive");
    const double slack = 1e-12 * t_f;
    if (t < -slack || t > t_f + slack) throw DomainError("sta_pulse: t outside [0, t_f]");
    const double g = M_PI * t / t_f;
    const double s = std::sin(g);
    const double s6 = s * s * s * s * s * s;
    const double rabi = (M_PI / t_f) * std::sqrt(1.0 + 16.0 * s6);
    const double detuning =
        -8.0 * (M_PI / t_f) * s * std::sin(2.0 * g) * (1.0 + 4.0 * s6) / (1.0 + 16.0 * s6);
    return {rabi, detuning};
}

namespace {

// Degree-(n_knots+1) interpolant: zero at both endpoints, prescribed values at
// the equally spaced interior knots.
Polynomial pinned_interpolant(const Eigen::VectorXd& knot_values, double t_f) {
    const int n = static_cast<int>(knot_values.size());
    std::vector<PolyConstraint> cs;
    cs.push_back({0.0, 0, 0.0});
    cs.push_back({t_f, 0, 0.0});
    for (int j = 1; j <= n; ++j)
        cs.push_back({t_f * j / (n + 1.0), 0, knot_values[j - 1]});
    return fit_polynomial(cs, t_f);
}

} // namespace

Polynomial correction_interpolant(const Eigen::Vector4d& knot_values, double t_f) {
    if (!(t_f > 0.0)) throw DomainError("correction_interpolant: t_f must be positive");
    if (knot_values.cwiseAbs().maxCoeff() == 0.0) return Polynomial::zero(t_f);
    return pinned_interpolant(knot_values, t_f);
}

Polynomial knot_basis(int k, int n_knots, double t_f) {
    if (k < 1 || k > n_knots) throw DomainError("knot_basis: knot index out of range");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_knots);
    v[k - 1] = 1.0;
    return pinned_interpolant(v, t_f);
}

Polynomial design_qc(double t_f, double d) {
    if (!(t_f > 0.0)) throw DomainError("design_qc: t_f must be positive");
    if (d < 0.0) throw DomainError("design_qc: d must be non-negative");
    if (d == 0.0) return Polynomial::zero(t_f);
    std::vector<PolyConstraint> cs;
    cs.push_back({0.0, 0, 0.0});
    cs.push_back({t_f, 0, d});
    for (int n = 1; n <= 4; ++n) {
        cs.push_back({0.0, n, 0.0});
        cs.push_back({t_f, n, 0.0});
    }
    return fit_polynomial(cs, t_f);
}

Polynomial q0_from_qc(const Polynomial& qc, double omega0) {
    if (!(omega0 > 0.0)) throw DomainError("q0_from_qc: omega0 must be positive");
    return qc + qc.derivative_poly(2) * (1.0 / (omega0 * omega0));
}

TransportTrajectory design_transport_sta(double t_f, double d, double omega0) {
    TransportTrajectory traj;
    traj.t_f = t_f;
    traj.d = d;
    traj.omega0 = omega0;
    traj.qc = design_qc(t_f, d);
    traj.q0_sta = q0_from_qc(traj.qc, omega0);
    traj.correction = Polynomial::zero(t_f);
    return traj;
}

TwoLevelScheme build_two_level_scheme(const ControlVector& eps, double t_f) {
    if (eps.dimension() != control_dimension(CaseId::TwoLevel))
        throw DomainError("build_two_level_scheme: control vector must have 8 components");
    TwoLevelScheme scheme;
    scheme.t_f = t_f;
    scheme.f1 = correction_interpolant(eps.values.segment<4>(0), t_f);
    scheme.f2 = correction_interpolant(eps.values.segment<4>(4), t_f);
    return scheme;
}

TransportTrajectory build_transport_scheme(const ControlVector& eps, double t_f, double d,
                                           double omega0) {
    if (eps.dimension() != control_dimension(CaseId::SingleTransport))
        throw DomainError("build_transport_scheme: control vector must have 6 components");
    TransportTrajectory traj = design_transport_sta(t_f, d, omega0);
    if (eps.values.cwiseAbs().maxCoeff() != 0.0)
        traj.correction = pinned_interpolant(eps.values, t_f);
    return traj;
}

Eigen::VectorXd transport_lambda0(const TransportTrajectory& sta) {
    Eigen::VectorXd v(6);
    for (int j = 1; j <= 6; ++j) v[j - 1] = sta.q0_sta(sta.t_f * j / 7.0);
    return v;
}

} // namespace esta
