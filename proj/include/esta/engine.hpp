#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "esta/models.hpp"
#include "esta/modes.hpp"
#include "esta/schemes.hpp"

namespace esta {

struct QuadOptions {
    double rel_tol = 1e-8;
    int gl_points = 8;
    int initial_panels = 0; // 0: case-dependent recommendation
    int max_panels = 1 << 15;
};

// Per-case access to the integrand matrix elements against the idealized
// solutions chi_n. Implementations are immutable and safe to share across
// threads.
class EstaProblem {
public:
    virtual ~EstaProblem() = default;

    virtual int control_dim() const = 0;
    virtual int max_modes() const = 0; // number of available excited modes
    virtual double t_f() const = 0;
    virtual int recommended_panels(int n) const = 0;

    // At each time in `times` (ascending), for excited mode n >= 1:
    //   gap[i]     = <chi_n(t_i)| H_S - H^(0) |chi_0(t_i)>
    //   grad[i][j] = <chi_n(t_i)| dH_S/dlambda_j |chi_0(t_i)>
    // Either output may be null.
    virtual void sample(int n, std::span<const double> times,
                        std::vector<std::complex<double>>* gap,
                        std::vector<Eigen::VectorXcd>* grad) const = 0;
};

// Two-level case: one excited mode, elements against the exactly propagated
// chi_0, chi_1 of the idealized Hamiltonian.
class TwoLevelProblem : public EstaProblem {
public:
    TwoLevelProblem(const CaseModel& model, double t_f);

    int control_dim() const override { return 8; }
    int max_modes() const override { return 1; }
    double t_f() const override { return t_f_; }
    int recommended_panels(int n) const override;
    void sample(int n, std::span<const double> times, std::vector<std::complex<double>>* gap,
                std::vector<Eigen::VectorXcd>* grad) const override;

    const TwoLevelScheme& baseline() const { return baseline_; }

private:
    CaseModel model_;
    double t_f_;
    TwoLevelScheme baseline_;
    std::vector<Polynomial> basis_; // b_1..b_4
};

// Transport cases. The two-ion case uses centre-of-mass modes with the
// relative coordinate frozen at the equilibrium distance, which reduces the
// integrands to shifted single-axis elements with offsets {+r_eq, -r_eq}.
class TransportProblem : public EstaProblem {
public:
    TransportProblem(const CaseModel& model, double t_f, int gh_nodes = 64);

    int control_dim() const override { return 6; }
    int max_modes() const override { return 8; }
    double t_f() const override { return t_f_; }
    int recommended_panels(int n) const override;
    void sample(int n, std::span<const double> times, std::vector<std::complex<double>>* gap,
                std::vector<Eigen::VectorXcd>* grad) const override;

    const TransportModes& modes() const { return modes_; }
    const CaseModel& model() const { return model_; }
    const std::vector<double>& offsets() const { return offsets_; }

private:
    CaseModel model_;
    double t_f_;
    TransportModes modes_;
    std::vector<double> offsets_; // trap-argument shifts: {0} or {+-r_eq}
    std::vector<Polynomial> basis_; // b_1..b_6
};

std::unique_ptr<EstaProblem> make_problem(const CaseModel& model, double t_f, int gh_nodes = 64);

// --- Integrals and the correction ----------------------------------------------

// G_n = Int_0^{t_f} <chi_n| H_S - H^(0) |chi_0> dt, adaptive composite
// Gauss-Legendre; throws AccuracyError when refinement is exhausted.
std::complex<double> compute_G(const EstaProblem& problem, int n, const QuadOptions& opts = {});

// K_n = Int_0^{t_f} <chi_n| grad_lambda H_S |chi_0> dt (one entry per control
// component).
Eigen::VectorXcd compute_K(const EstaProblem& problem, int n, const QuadOptions& opts = {});

struct EstaTerms {
    std::vector<std::complex<double>> G; // n = 1..N
    std::vector<Eigen::VectorXcd> K;
    int N = 0;
    Eigen::VectorXd lambda0;
    Eigen::VectorXd eps;
    Eigen::VectorXd lambda_s;
    double F_estimate = 1.0;
    Eigen::VectorXd grad_estimate;
    bool degenerate = false; // gradient norm below threshold; eps forced to 0
};

// F(mu_s, lambda0) ~ 1 - Sum_n |G_n|^2 (hbar = 1).
double fidelity_estimate(std::span<const std::complex<double>> G);

// grad F(mu_s, lambda0) ~ -2 Sum_n Re(G_n K_n^*), componentwise.
Eigen::VectorXd gradient_estimate(std::span<const std::complex<double>> G,
                                  std::span<const Eigen::VectorXcd> K);

// eps = -(Sum |G_n|^2) R / |R|^2 with R = Sum Re(G_n^* K_n); falls back to
// eps = 0 with the degenerate flag set when |R| is below threshold.
EstaTerms esta_correction(std::vector<std::complex<double>> G, std::vector<Eigen::VectorXcd> K,
                          Eigen::VectorXd lambda0);

// Convenience: compute G_1..G_N, K_1..K_N and the correction for a case.
EstaTerms compute_esta_terms(const EstaProblem& problem, const Eigen::VectorXd& lambda0, int N,
                             const QuadOptions& opts = {});

} // namespace esta
