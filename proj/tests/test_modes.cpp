#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "esta/errors.hpp"
#include "esta/modes.hpp"
#include "esta/propagators.hpp"

using namespace esta;
using std::complex;

namespace {

constexpr complex<double> kI{0.0, 1.0};

std::vector<double> uniform_times(double t_f, int n) {
    std::vector<double> ts(n + 1);
    for (int i = 0; i <= n; ++i) ts[i] = t_f * i / n;
    return ts;
}

// Analytic transport mode chi_n(x, t) = e^{i theta_n} e^{i m qc_dot x} phi_n(x - q_c).
complex<double> transport_mode_value(const TransportModes& modes, int n, double x, double t) {
    const TransportTrajectory& traj = modes.trajectory();
    const double s = std::sqrt(modes.mass() * modes.omega());
    const double u = s * (x - traj.qc(t));
    const double phi = std::sqrt(s) * hermite_normalized(n, u) * std::exp(-0.5 * u * u);
    const double boost = modes.mass() * traj.qc_dot(t) * x;
    return std::exp(kI * (modes.phase(n, t) + boost)) * phi;
}

} // namespace

TEST_SUITE_BEGIN("modes");

TEST_CASE("two-level modes stay orthonormal") {
    const double t_f = 1.5;
    const TwoLevelScheme base = build_two_level_scheme(ControlVector::zero(8), t_f);
    const TwoLevelModes modes = two_level_modes(base, t_f, uniform_times(t_f, 100));
    for (size_t i = 0; i < modes.times.size(); ++i) {
        CHECK(std::abs(modes.chi0[i].norm() - 1.0) < 1e-8);
        CHECK(std::abs(modes.chi1[i].norm() - 1.0) < 1e-8);
        CHECK(std::abs((modes.chi0[i].adjoint() * modes.chi1[i])(0)) < 1e-8);
    }
}

TEST_CASE("the baseline pulse inverts the population of the idealized system") {
    for (double t_f : {0.4, 1.0, 3.7}) {
        const TwoLevelScheme base = build_two_level_scheme(ControlVector::zero(8), t_f);
        const TwoLevelModes modes = two_level_modes(base, t_f, {t_f});
        const Eigen::Vector2cd target(0.0, 1.0);
        CHECK(std::norm((target.adjoint() * modes.chi0.back())(0)) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("two-level modes converge under step halving") {
    const double t_f = 2.0;
    const TwoLevelScheme base = build_two_level_scheme(ControlVector::zero(8), t_f);
    const TwoLevelModes coarse = two_level_modes(base, t_f, {t_f}, t_f / 500.0);
    const TwoLevelModes fine = two_level_modes(base, t_f, {t_f}, t_f / 1000.0);
    CHECK((coarse.chi0.back() - fine.chi0.back()).norm() < 1e-9);
    CHECK((coarse.chi1.back() - fine.chi1.back()).norm() < 1e-9);
}

TEST_CASE("two-level modes satisfy the Schrodinger equation") {
    const double t_f = 1.2, delta = 1e-5;
    const TwoLevelScheme base = build_two_level_scheme(ControlVector::zero(8), t_f);
    for (double t : {0.3 * t_f, 0.62 * t_f}) {
        const TwoLevelModes m = two_level_modes(base, t_f, {t - delta, t, t + delta});
        const Eigen::Matrix2cd h = two_level_H(HamKind::Idealized, base, 0.0, t);
        const Eigen::Vector2cd dchi = (m.chi0[2] - m.chi0[0]) / (2.0 * delta);
        CHECK((kI * dchi - h * m.chi0[1]).norm() < 1e-6);
        const Eigen::Vector2cd dchi1 = (m.chi1[2] - m.chi1[0]) / (2.0 * delta);
        CHECK((kI * dchi1 - h * m.chi1[1]).norm() < 1e-6);
    }
}

TEST_CASE("transport matrix elements") {
    const double t_f = 4.0, d = 10.0;
    const TransportModes modes(design_transport_sta(t_f, d, 1.0), 1.0, 1.0);
    const double t = 0.4 * t_f;
    SUBCASE("constant operators are orthogonal to excited modes") {
        for (int n : {1, 2, 3})
            CHECK(std::abs(modes.matrix_element(n, [](double) { return 3.7; }, t)) < 1e-12);
        CHECK(std::abs(modes.matrix_element(0, [](double) { return 3.7; }, t) - 3.7) < 1e-12);
    }
    SUBCASE("first oscillator moment") {
        const double qc = modes.trajectory().qc(t);
        const complex<double> elem =
            modes.matrix_element(1, [&](double x) { return x - qc; }, t);
        const complex<double> expected = std::exp(kI * t) / std::sqrt(2.0);
        CHECK(std::abs(elem - expected) < 1e-10);
    }
    SUBCASE("vanishing potential gap gives zero elements") {
        for (int n : {1, 2})
            CHECK(std::abs(modes.matrix_element(n, [](double) { return 0.0; }, t)) == 0.0);
    }
}

TEST_CASE("transport matrix elements with centre-of-mass scaling") {
    // Two-ion COM parameters: mass M = 2, frequency sqrt(2).
    const double t_f = 4.0, d = 10.0;
    const double omega = std::sqrt(2.0);
    const TransportModes modes(design_transport_sta(t_f, d, omega), 2.0, omega);
    const double t = 0.3 * t_f;
    const double qc = modes.trajectory().qc(t);
    const complex<double> elem = modes.matrix_element(1, [&](double x) { return x - qc; }, t);
    const double width = 1.0 / std::sqrt(2.0 * omega);
    CHECK(std::abs(elem - std::exp(kI * omega * t) * width / std::sqrt(2.0)) < 1e-10);
}

TEST_CASE("transport mode phases") {
    const double t_f = 3.0;
    SUBCASE("zero at t = 0") {
        const TransportModes modes(design_transport_sta(t_f, 8.0, 1.0), 1.0, 1.0);
        for (int n : {0, 1, 2}) CHECK(modes.phase(n, 0.0) == 0.0);
    }
    SUBCASE("static trap gives stationary-state phases") {
        const TransportModes modes(design_transport_sta(t_f, 0.0, 1.0), 1.0, 1.0);
        for (int n : {0, 1, 3}) {
            const double t = 0.7;
            CHECK(modes.phase(n, t) == doctest::Approx(-(n + 0.5) * t).epsilon(1e-12));
        }
    }
    SUBCASE("phase differences are -n omega t") {
        const double omega = std::sqrt(2.0);
        const TransportModes modes(design_transport_sta(t_f, 12.0, omega), 2.0, omega);
        for (double t : {0.5, 1.9, t_f}) {
            const double th0 = modes.phase(0, t);
            for (int n : {1, 2}) {
                CHECK(modes.phase(n, t) - th0 ==
                      doctest::Approx(-n * omega * t).scale(1.0 + std::abs(th0)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("assembled transport modes solve the Schrodinger equation") {
    // Oracle: independent split-operator propagation of the analytic mode over
    // a short interval; the boost and Lewis-Riesenfeld phases must both be
    // right for the overlap to stay at unity.
    const double t_f = 4.0, d = 5.0;
    struct Setup {
        double mass, omega;
    };
    for (const Setup& su : {Setup{1.0, 1.0}, Setup{2.0, std::sqrt(2.0)}}) {
        const TransportTrajectory traj = design_transport_sta(t_f, d, su.omega);
        const TransportModes modes(traj, su.mass, su.omega);
        Grid1d grid{-10.0, 18.0, 1024};
        const double t0 = 0.35 * t_f, t1 = t0 + 0.2;
        for (int n : {0, 1}) {
            WaveFunction1d psi;
            psi.grid = grid;
            psi.amp.resize(grid.n);
            for (int i = 0; i < grid.n; ++i)
                psi.amp[i] = transport_mode_value(modes, n, grid.x(i), t0);
            psi.time = t0;
            TimePotential1d v = [&](double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
                out = 0.5 * su.mass * su.omega * su.omega * (x - traj.q0(t)).square();
            };
            split_step_1d(psi, v, su.mass, t1, 4000);
            WaveFunction1d ref;
            ref.grid = grid;
            ref.amp.resize(grid.n);
            for (int i = 0; i < grid.n; ++i)
                ref.amp[i] = transport_mode_value(modes, n, grid.x(i), t1);
            complex<double> ov = 0.0;
            for (int i = 0; i < grid.n; ++i)
                ov += std::conj(ref.amp[i]) * psi.amp[i] * grid.dx();
            // Real part near one certifies the phase convention, not only the
            // modulus.
            CHECK(ov.real() == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(std::abs(ov.imag()) < 1e-5);
        }
    }
}

TEST_CASE("gauss-hermite node doubling detects its convergence") {
    const TransportModes modes(design_transport_sta(2.0, 6.0, 1.0), 1.0, 1.0, 8);
    // Smooth integrand converges from a tiny rule; result matches a large rule.
    const double a = modes.oscillator_integral(1, 0, [](double u) { return u * u * u; });
    const TransportModes fine(design_transport_sta(2.0, 6.0, 1.0), 1.0, 1.0, 256);
    const double b = fine.oscillator_integral(1, 0, [](double u) { return u * u * u; });
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_SUITE_END();
