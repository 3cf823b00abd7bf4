#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>

#include "esta/errors.hpp"
#include "esta/models.hpp"
#include "esta/propagators.hpp"
#include "esta/schemes.hpp"

using namespace esta;
using std::complex;

namespace {

constexpr complex<double> kI{0.0, 1.0};

// Dense spectral Hamiltonian K + V on the grid (DFT kinetic), used as an
// independent diagonalization oracle for the imaginary-time solver.
Eigen::MatrixXcd spectral_hamiltonian(const Grid1d& grid, double mass,
                                      const std::function<double(double)>& V) {
    const int n = grid.n;
    Eigen::MatrixXcd f(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            f(j, l) = std::exp(-2.0 * M_PI * kI * double(j) * double(l) / double(n)) /
                      std::sqrt(double(n));
    const Eigen::ArrayXd k = grid.momenta();
    Eigen::MatrixXcd h = f.adjoint() * (k * k / (2.0 * mass)).matrix().asDiagonal() * f;
    for (int i = 0; i < n; ++i) h(i, i) += V(grid.x(i));
    return h;
}

double mean_position(const WaveFunction1d& psi) {
    double acc = 0.0;
    for (int i = 0; i < psi.grid.n; ++i)
        acc += std::norm(psi.amp[i]) * psi.grid.x(i) * psi.grid.dx();
    return acc;
}

struct StaticHarmonic2d final : Potential2d {
    double mass;
    double value(double xc, double xr, double) const override {
        return 0.5 * mass * (xc * xc + xr * xr);
    }
};

} // namespace

TEST_SUITE_BEGIN("propagators");

TEST_CASE("two-level propagation basics") {
    SUBCASE("zero Hamiltonian is the identity") {
        auto h = [](double) { return Eigen::Matrix2cd::Zero().eval(); };
        const Eigen::Vector2cd psi0(0.6, complex<double>(0.0, 0.8));
        const Eigen::Vector2cd psi = propagate_two_level(h, psi0, 2.0);
        CHECK((psi - psi0).norm() < 1e-14);
    }
    SUBCASE("constant Rabi drive inverts at the half period") {
        const double rabi = 3.0;
        auto h = [&](double) {
            Eigen::Matrix2cd m;
            m << 0.0, 0.5 * rabi, 0.5 * rabi, 0.0;
            return m;
        };
        const Eigen::Vector2cd psi = propagate_two_level(h, {1.0, 0.0}, M_PI / rabi);
        CHECK(std::norm(psi(1)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("baseline pulse gives unit fidelity on the idealized Hamiltonian") {
        for (double t_f : {0.3, 1.0, 2.4, 6.0}) {
            const TwoLevelScheme s = build_two_level_scheme(ControlVector::zero(8), t_f);
            auto h = [&](double t) { return two_level_H(HamKind::Idealized, s, 0.0, t); };
            const Eigen::Vector2cd psi = propagate_two_level(h, {1.0, 0.0}, t_f);
            CHECK(std::norm(psi(1)) >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("two-level integrator is fourth order") {
    const double t_f = 1.0;
    const TwoLevelScheme s = build_two_level_scheme(ControlVector::zero(8), t_f);
    auto h = [&](double t) { return two_level_H(HamKind::System, s, 11.0, t); };
    auto u_with = [&](double step) {
        return propagate_two_level_matrix(h, Eigen::Matrix2cd::Identity(), 0.0, t_f, step);
    };
    const Eigen::Matrix2cd ref = u_with(t_f / 8192.0);
    const double e1 = (u_with(t_f / 128.0) - ref).norm();
    const double e2 = (u_with(t_f / 256.0) - ref).norm();
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("two-level step-halving verification flags a too-coarse step") {
    const double t_f = 1.0;
    const TwoLevelScheme s = build_two_level_scheme(ControlVector::zero(8), t_f);
    auto h = [&](double t) { return two_level_H(HamKind::System, s, 60.0, t); };
    StepControl ctrl;
    ctrl.max_step = t_f / 8.0; // deliberately coarse
    ctrl.verify = true;
    ctrl.verify_tol = 1e-12;
    CHECK_THROWS_AS(propagate_two_level(h, {1.0, 0.0}, t_f, ctrl), AccuracyError);
}

TEST_CASE("stationary state autocorrelation stays at one") {
    Grid1d grid{-12.0, 12.0, 256};
    const WaveFunction1d gs = oscillator_ground_state(grid, 1.0, 1.0, 0.0);
    WaveFunction1d psi = gs;
    TimePotential1d v = [](double, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
        out = 0.5 * x.square();
    };
    split_step_1d(psi, v, 1.0, 3.0, 3000);
    CHECK(fidelity(psi, gs) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("coherent state centre follows the classical closed form") {
    Grid1d grid{-12.0, 12.0, 512};
    WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 2.0);
    TimePotential1d v = [](double, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
        out = 0.5 * x.square();
    };
    const double t = 2.3;
    split_step_1d(psi, v, 1.0, t, 4600);
    CHECK(mean_position(psi) == doctest::Approx(2.0 * std::cos(t)).scale(1.0).epsilon(1e-6));
}

TEST_CASE("norm drift stays below 1e-10 over ten thousand steps") {
    Grid1d grid{-10.0, 10.0, 128};
    WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 0.5);
    TimePotential1d v = [](double, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
        out = 0.5 * x.square();
    };
    split_step_1d(psi, v, 1.0, 10.0, 10000);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
}

TEST_CASE("split step is second order in the time step") {
    Grid1d grid{-12.0, 12.0, 256};
    auto run = [&](int steps) {
        WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 1.5);
        TimePotential1d v = [](double, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
            out = 0.5 * x.square();
        };
        split_step_1d(psi, v, 1.0, 1.0, steps);
        return psi;
    };
    const WaveFunction1d ref = run(16384);
    const double e1 = (run(128).amp - ref.amp).norm();
    const double e2 = (run(256).amp - ref.amp).norm();
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("momentum aliasing raises a grid error") {
    Grid1d grid{-6.0, 6.0, 64};
    WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 0.0);
    // Boost near the grid's momentum edge.
    const double k_edge = M_PI / grid.dx();
    for (int i = 0; i < grid.n; ++i)
        psi.amp[i] *= std::exp(kI * 0.9 * k_edge * grid.x(i));
    TimePotential1d v = [](double, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
        out = 0.5 * x.square();
    };
    SplitOptions opts;
    opts.aliasing_stride = 1;
    CHECK_THROWS_AS(split_step_1d(psi, v, 1.0, 0.5, 100, opts), GridError);
}

TEST_CASE("imaginary time finds the harmonic ground state") {
    Grid1d grid{-10.0, 10.0, 256};
    auto v = [](double x) { return 0.5 * x * x; };
    const WaveFunction1d gs = ground_state_1d(v, 1.0, grid, 1.3, 2.0); // biased guess
    CHECK(energy_1d(gs, v, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(fidelity(gs, oscillator_ground_state(grid, 1.0, 1.0, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian-trap ground state matches dense diagonalization") {
    const double a = 1e5;
    Grid1d grid{-8.0, 8.0, 256};
    auto v = [&](double x) { return gaussian_potential(x, a); };
    const WaveFunction1d gs = ground_state_1d(v, 1.0, grid, 0.0, 1.0);
    const double e_ite = energy_1d(gs, v, 1.0);
    CHECK(e_ite < 0.5); // anharmonic softening

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spectral_hamiltonian(grid, 1.0, v));
    CHECK(e_ite == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));
}

TEST_CASE("two-ion relative ground state localizes at the equilibrium distance") {
    // Scaled-down Coulomb constant: r_eq = (C/(4M))^(1/3) = (4000/8)^(1/3).
    const double C = 4000.0, mass = 2.0;
    const double r_eq = std::cbrt(C / (4.0 * mass));
    Grid1d grid{r_eq - 6.0, r_eq + 6.0, 256};
    auto v = [&](double x) { return mass * x * x + C / (2.0 * x); };
    const WaveFunction1d gs = ground_state_1d(v, mass, grid, r_eq, 0.5);
    CHECK(std::abs(mean_position(gs) - r_eq) < 0.1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spectral_hamiltonian(grid, mass, v));
    CHECK(energy_1d(gs, v, mass) == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));
}

TEST_CASE("fidelity semantics") {
    Grid1d grid{-10.0, 10.0, 128};
    const WaveFunction1d a = oscillator_ground_state(grid, 1.0, 1.0, 0.0);
    SUBCASE("identical states") { CHECK(fidelity(a, a) == doctest::Approx(1.0)); }
    SUBCASE("global phase is irrelevant") {
        WaveFunction1d b = a;
        b.amp *= std::exp(kI * 0.77);
        CHECK(fidelity(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("distant states are orthogonal") {
        const WaveFunction1d far = oscillator_ground_state(grid, 1.0, 1.0, 8.0);
        CHECK(fidelity(a, far) < 1e-12);
    }
    SUBCASE("representation mismatch is rejected") {
        WaveFunction1d other = oscillator_ground_state(Grid1d{-10.0, 10.0, 256}, 1.0, 1.0, 0.0);
        CHECK_THROWS_AS(fidelity(a, other), DomainError);
    }
}

TEST_CASE("spectral translation shifts without distortion") {
    Grid1d grid{-14.0, 18.0, 512};
    const WaveFunction1d a = oscillator_ground_state(grid, 1.0, 1.0, -3.0);
    const WaveFunction1d moved = translated(a, 5.5);
    CHECK(fidelity(moved, oscillator_ground_state(grid, 1.0, 1.0, 2.5)) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("wavefunction checkpoints round-trip bit exactly") {
    SUBCASE("1d") {
        Grid1d grid{-5.0, 5.0, 64};
        WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 0.7);
        psi.time = 1.25;
        const std::string path = "/tmp/esta_test_wf1.bin";
        write_wavefunction(path, psi);
        const WaveFunction1d back = read_wavefunction_1d(path);
        CHECK(back.grid.n == psi.grid.n);
        CHECK(back.grid.min == psi.grid.min);
        CHECK(back.time == psi.time);
        CHECK((back.amp - psi.amp).norm() == 0.0);
        std::remove(path.c_str());
    }
    SUBCASE("2d") {
        WaveFunction2d psi;
        psi.grid.c = {-2.0, 2.0, 16};
        psi.grid.r = {1.0, 3.0, 8};
        psi.amp = Eigen::MatrixXcd::Random(16, 8);
        psi.time = 0.5;
        const std::string path = "/tmp/esta_test_wf2.bin";
        write_wavefunction(path, psi);
        const WaveFunction2d back = read_wavefunction_2d(path);
        CHECK(back.grid.r.max == psi.grid.r.max);
        CHECK((back.amp - psi.amp).norm() == 0.0);
        CHECK_THROWS_AS(read_wavefunction_1d(path), DomainError);
        std::remove(path.c_str());
    }
}

TEST_CASE("2d ground state and propagation on a separable trap") {
    StaticHarmonic2d pot;
    pot.mass = 2.0;
    Grid2d grid;
    grid.c = {-6.0, 6.0, 64};
    grid.r = {-6.0, 6.0, 64};
    const WaveFunction2d gs = ground_state_2d(pot, pot.mass, grid, 0.0, 0.0, 1.0);

    // Analytic product ground state of two mass-2 oscillators with omega = 1.
    WaveFunction2d ref;
    ref.grid = grid;
    ref.amp.resize(64, 64);
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) {
            const double xc = grid.c.x(i), xr = grid.r.x(j);
            ref.amp(i, j) = std::exp(-0.5 * pot.mass * (xc * xc + xr * xr));
        }
    ref.normalize();
    CHECK(fidelity(gs, ref) == doctest::Approx(1.0).epsilon(1e-8));

    WaveFunction2d psi = gs;
    split_step_2d(psi, pot, pot.mass, 1.0, 500);
    CHECK(fidelity(psi, gs) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
}

TEST_CASE("two-ion style propagation keeps boundary population negligible") {
    // Small transport in the (x_c, x_r) plane with a hard relative-axis wall.
    const CaseModel model = two_ion_model(1e4, 6.0, 512.0); // r_eq = 4
    const double r_eq = equilibrium_distance(model);
    struct Pot final : Potential2d {
        CaseModel m;
        double d, t_f;
        double q0(double t) const {
            const double s = std::clamp(t / t_f, 0.0, 1.0);
            return d * s * s * (3.0 - 2.0 * s);
        }
        double value(double xc, double xr, double t) const override {
            return two_ion_potentials(xc, xr, q0(t), m).system;
        }
    } pot;
    pot.m = model;
    pot.d = model.d;
    pot.t_f = 4.0;

    Grid2d grid;
    grid.c = {-8.0, 14.0, 256};
    grid.r = {r_eq / 4.0, r_eq / 4.0 + 8.0, 64};
    WaveFunction2d psi = ground_state_2d(pot, model.mass, grid, 0.0, r_eq, 0.6);
    split_step_2d(psi, pot, model.mass, pot.t_f, 2000);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);

    // Position-space population in the outermost cells of both axes.
    double edge = 0.0;
    for (int j = 0; j < grid.r.n; ++j)
        for (int i = 0; i < grid.c.n; ++i)
            if (i < 2 || i >= grid.c.n - 2 || j < 2 || j >= grid.r.n - 2)
                edge += std::norm(psi.amp(i, j)) * grid.c.dx() * grid.r.dx();
    CHECK(edge < 1e-8);
}

TEST_SUITE_END();
