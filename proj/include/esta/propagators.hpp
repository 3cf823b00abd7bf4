#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

#include "esta/errors.hpp"

namespace esta {

// --- Spatial grids ---------------------------------------------------------
//
// Periodic FFT grids: x_i = min + i dx with dx = (max - min)/n; the point
// `max` itself is the periodic image of `min`. Point counts are powers of two.

struct Grid1d {
    double min = 0.0;
    double max = 1.0;
    int n = 2;

    double dx() const { return (max - min) / n; }
    double x(int i) const { return min + i * dx(); }
    Eigen::ArrayXd positions() const;
    // Momentum grid in FFT ordering (k_j = 2 pi j / (n dx), j wrapped to +-n/2).
    Eigen::ArrayXd momenta() const;
};

struct Grid2d {
    Grid1d c; // centre-of-mass axis; contiguous (fastest) index
    Grid1d r; // relative axis
};

bool is_power_of_two(int n);
void validate_grid(const Grid1d& g);

// --- Wavefunctions ----------------------------------------------------------

struct WaveFunction1d {
    Grid1d grid;
    Eigen::VectorXcd amp;
    double time = 0.0;

    double norm() const;
    void normalize();
};

struct WaveFunction2d {
    Grid2d grid;
    Eigen::MatrixXcd amp; // amp(i_c, i_r)
    double time = 0.0;

    double norm() const;
    void normalize();
};

// Squared overlap |<a|b>|^2 with the grid measure; throws DomainError when
// the representations differ.
double fidelity(const WaveFunction1d& a, const WaveFunction1d& b);
double fidelity(const WaveFunction2d& a, const WaveFunction2d& b);
double fidelity(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);

// Exact spectral translation x -> x + shift (2d: along the c axis).
WaveFunction1d translated(const WaveFunction1d& psi, double shift);
WaveFunction2d translated_c(const WaveFunction2d& psi, double shift);

// Total energy <T> + <V> of a normalized state.
double energy_1d(const WaveFunction1d& psi, const std::function<double(double)>& V, double mass);

// Analytic oscillator ground state phi_0(x - center) for (mass, omega),
// normalized on the grid.
WaveFunction1d oscillator_ground_state(const Grid1d& grid, double mass, double omega,
                                       double center);

// --- Potentials --------------------------------------------------------------

// Fills V(x_i, t) for all grid points; implementations should vectorize.
using TimePotential1d =
    std::function<void(double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& out)>;

// Adapter for a pointwise f(x, t).
TimePotential1d pointwise_potential(std::function<double(double, double)> f);

// Potential on a 2D grid. fill_exp writes exp(factor * V(x_c, x_r, t)); the
// default implementation loops over value(), concrete potentials may exploit
// structure (separability, shifted 1D profiles).
class Potential2d {
public:
    virtual ~Potential2d() = default;
    virtual double value(double x_c, double x_r, double t) const = 0;
    virtual void fill_exp(double t, std::complex<double> factor, const Grid2d& grid,
                          Eigen::MatrixXcd& out) const;
};

// --- Split-operator propagation ----------------------------------------------

struct SplitOptions {
    double aliasing_tol = 1e-8; // max allowed momentum-edge population
    int aliasing_stride = 64;   // steps between checks (0 disables)
    double norm_tol = 1e-10;    // allowed norm drift over the whole run
};

// Strang split-step (half potential, full kinetic, half potential), second
// order in dt; the potential is sampled at the step midpoint. Advances
// psi.time to t_target in n_steps equal steps.
void split_step_1d(WaveFunction1d& psi, const TimePotential1d& V, double mass, double t_target,
                   int n_steps, const SplitOptions& opts = {});
void split_step_2d(WaveFunction2d& psi, const Potential2d& V, double mass, double t_target,
                   int n_steps, const SplitOptions& opts = {});

// --- Imaginary-time ground state ----------------------------------------------

struct GroundStateOptions {
    double dtau_start = 0.05;
    double dtau_min = 2e-4;
    double dtau_shrink = 0.2;   // stage-to-stage reduction factor
    double energy_tol = 1e-10;  // Rayleigh-quotient stationarity
    int max_iters_per_stage = 40000;
    int energy_stride = 1;      // iterations between energy checks
};

// Normalized ground state by imaginary-time split-step evolution with a
// staged step-size schedule; throws ConvergenceError when the Rayleigh
// quotient fails to become stationary.
WaveFunction1d ground_state_1d(const std::function<double(double)>& V, double mass,
                               const Grid1d& grid, double guess_center, double guess_width,
                               const GroundStateOptions& opts = {});
WaveFunction2d ground_state_2d(const Potential2d& V, double mass, const Grid2d& grid,
                               double guess_center_c, double guess_center_r, double guess_width,
                               const GroundStateOptions& opts = {});

// --- Two-level propagation -----------------------------------------------------

// 4th-order Magnus integrator; each step applies the exact exponential of the
// two-point Gauss-Legendre Magnus expansion, hence is exactly unitary.
Eigen::Matrix2cd propagate_two_level_matrix(const std::function<Eigen::Matrix2cd(double)>& H,
                                            const Eigen::Matrix2cd& u0, double t0, double t1,
                                            double max_step);

struct StepControl {
    double max_step = 0.0; // 0: t_f / 4096
    bool verify = false;   // re-run at half step and compare
    double verify_tol = 1e-9;
};

Eigen::Vector2cd propagate_two_level(const std::function<Eigen::Matrix2cd(double)>& H,
                                     const Eigen::Vector2cd& psi0, double t_f,
                                     const StepControl& ctrl = {});

// --- Binary wavefunction checkpoints ---------------------------------------------
//
// Layout (little-endian): magic "ESTAWFN1" (8 bytes), uint32 ndim, then per
// axis {uint64 n, float64 min, float64 max}, float64 time, then n_total
// complex amplitudes as (re, im) float64 pairs with the first axis fastest.

void write_wavefunction(const std::string& path, const WaveFunction1d& psi);
void write_wavefunction(const std::string& path, const WaveFunction2d& psi);
WaveFunction1d read_wavefunction_1d(const std::string& path);
WaveFunction2d read_wavefunction_2d(const std::string& path);

} // namespace esta
