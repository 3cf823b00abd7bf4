#include "esta/engine.hpp"

#include <cmath>

#include "esta/errors.hpp"
#include "esta/quadrature.hpp"

namespace esta {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

// --- TwoLevelProblem ---------------------------------------------------------

TwoLevelProblem::TwoLevelProblem(const CaseModel& model, double t_f)
    : model_(model), t_f_(t_f) {
    if (model.id != CaseId::TwoLevel) throw DomainError("TwoLevelProblem: wrong case id");
    baseline_ = build_two_level_scheme(ControlVector::zero(8), t_f);
    basis_.reserve(4);
    for (int k = 1; k <= 4; ++k) basis_.push_back(knot_basis(k, 4, t_f));
}

int TwoLevelProblem::recommended_panels(int) const {
    // Resolve the counter-rotating oscillation at 2 * omega_carrier.
    const double periods = model_.omega_carrier * t_f_ / M_PI;
    return std::max(16, static_cast<int>(std::ceil(2.0 * periods)));
}

void TwoLevelProblem::sample(int n, std::span<const double> times,
                             std::vector<std::complex<double>>* gap,
                             std::vector<Eigen::VectorXcd>* grad) const {
    if (n != 1) throw DomainError("TwoLevelProblem: only one excited mode exists");
    const std::vector<double> ts(times.begin(), times.end());
    const TwoLevelModes modes = two_level_modes(baseline_, t_f_, ts);

    if (gap) gap->assign(times.size(), 0.0);
    if (grad) grad->assign(times.size(), Eigen::VectorXcd::Zero(8));

    const double w = model_.omega_carrier;
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const Eigen::Vector2cd& c0 = modes.chi0[i];
        const Eigen::Vector2cd& c1 = modes.chi1[i];
        if (gap) {
            if (model_.mu_zero) {
                (*gap)[i] = 0.0;
            } else {
                const double rabi = baseline_.rabi(t);
                // H_S - H_0 = (1/2) Omega [[0, e^{-2iwt}], [e^{+2iwt}, 0]]
                Eigen::Matrix2cd dh;
                const std::complex<double> cr = std::exp(-2.0 * kI * w * t);
                dh << 0.0, 0.5 * rabi * cr, 0.5 * rabi * std::conj(cr), 0.0;
                (*gap)[i] = (c1.adjoint() * dh * c0)(0);
            }
        }
        if (grad) {
            const std::complex<double> coupling =
                model_.mu_zero ? 1.0 : 1.0 + std::exp(-2.0 * kI * w * t);
            Eigen::VectorXcd row(8);
            for (int k = 0; k < 4; ++k) {
                const double b = basis_[k](t);
                Eigen::Matrix2cd hk;
                hk << 0.0, 0.5 * b * coupling, 0.5 * b * std::conj(coupling), 0.0;
                row[k] = (c1.adjoint() * hk * c0)(0);
                Eigen::Matrix2cd hd;
                hd << -0.5 * b, 0.0, 0.0, 0.5 * b;
                row[k + 4] = (c1.adjoint() * hd * c0)(0);
            }
            (*grad)[i] = std::move(row);
        }
    }
}

// --- TransportProblem ----------------------------------------------------------

TransportProblem::TransportProblem(const CaseModel& model, double t_f, int gh_nodes)
    : model_(model), t_f_(t_f),
      modes_(design_transport_sta(t_f, model.d, model.idealized_omega()), model.mass,
             model.idealized_omega(), gh_nodes) {
    if (model.id == CaseId::TwoLevel) throw DomainError("TransportProblem: wrong case id");
    if (model.id == CaseId::TwoIon) {
        const double r_eq = equilibrium_distance(model);
        offsets_ = {r_eq, -r_eq};
    } else {
        offsets_ = {0.0};
    }
    basis_.reserve(6);
    for (int j = 1; j <= 6; ++j) basis_.push_back(knot_basis(j, 6, t_f));
}

int TransportProblem::recommended_panels(int n) const {
    const double periods = n * modes_.omega() * t_f_ / (2.0 * M_PI);
    return std::max(16, static_cast<int>(std::ceil(4.0 * periods)));
}

void TransportProblem::sample(int n, std::span<const double> times,
                              std::vector<std::complex<double>>* gap,
                              std::vector<Eigen::VectorXcd>* grad) const {
    if (n < 1) throw DomainError("TransportProblem: mode index must be >= 1");
    if (gap) gap->assign(times.size(), 0.0);
    if (grad) grad->assign(times.size(), Eigen::VectorXcd::Zero(6));

    const TransportTrajectory& traj = modes_.trajectory();
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double shift = traj.qc(t) - traj.q0(t); // = -qc_ddot/omega0^2
        if (gap) {
            double integral = 0.0;
            if (!model_.mu_zero) {
                for (double off : offsets_)
                    integral += modes_.oscillator_integral(n, 0, [&](double u) {
                        return delta_potential(u + shift + off, model_.a, model_.mass);
                    });
            }
            (*gap)[i] = std::polar(1.0, n * modes_.omega() * t) * integral;
        }
        if (grad) {
            double force = 0.0;
            for (double off : offsets_) {
                if (model_.mu_zero)
                    force += modes_.oscillator_integral(
                        n, 0, [&](double u) { return model_.mass * (u + shift + off); });
                else
                    force += modes_.oscillator_integral(n, 0, [&](double u) {
                        return gaussian_potential_deriv(u + shift + off, model_.a, model_.mass);
                    });
            }
            const std::complex<double> elem = -std::polar(1.0, n * modes_.omega() * t) * force;
            Eigen::VectorXcd row(6);
            for (int j = 0; j < 6; ++j) row[j] = elem * basis_[j](t);
            (*grad)[i] = std::move(row);
        }
    }
}

std::unique_ptr<EstaProblem> make_problem(const CaseModel& model, double t_f, int gh_nodes) {
    if (model.id == CaseId::TwoLevel)
        return std::make_unique<TwoLevelProblem>(model, t_f);
    return std::make_unique<TransportProblem>(model, t_f, gh_nodes);
}

// --- adaptive integrals -----------------------------------------------------------

namespace {

struct SampledIntegral {
    std::complex<double> gap;
    Eigen::VectorXcd grad;
    double gap_l1 = 0.0;
    double grad_l1 = 0.0;
};

SampledIntegral integrate_once(const EstaProblem& problem, int n, int panels, int points,
                               bool want_gap, bool want_grad) {
    const CompositeRule rule = composite_gauss_legendre(0.0, problem.t_f(), panels, points);
    std::vector<std::complex<double>> gap;
    std::vector<Eigen::VectorXcd> grad;
    problem.sample(n, rule.nodes, want_gap ? &gap : nullptr, want_grad ? &grad : nullptr);

    SampledIntegral out;
    out.grad = Eigen::VectorXcd::Zero(problem.control_dim());
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double w = rule.weights[i];
        if (want_gap) {
            out.gap += w * gap[i];
            out.gap_l1 += w * std::abs(gap[i]);
        }
        if (want_grad) {
            out.grad += w * grad[i];
            out.grad_l1 += w * grad[i].cwiseAbs().sum();
        }
    }
    return out;
}

} // namespace

std::complex<double> compute_G(const EstaProblem& problem, int n, const QuadOptions& opts) {
    const int p0 = opts.initial_panels > 0 ? opts.initial_panels : problem.recommended_panels(n);
    SampledIntegral prev = integrate_once(problem, n, p0, opts.gl_points, true, false);
    for (int panels = 2 * p0; panels <= opts.max_panels; panels *= 2) {
        const SampledIntegral cur = integrate_once(problem, n, panels, opts.gl_points, true, false);
        const double floor = 1e-10 * cur.gap_l1 + 1e-280;
        if (std::abs(cur.gap - prev.gap) <= opts.rel_tol * std::abs(cur.gap) + floor)
            return cur.gap;
        prev = cur;
    }
    throw AccuracyError("compute_G: time quadrature did not converge");
}

Eigen::VectorXcd compute_K(const EstaProblem& problem, int n, const QuadOptions& opts) {
    const int p0 = opts.initial_panels > 0 ? opts.initial_panels : problem.recommended_panels(n);
    SampledIntegral prev = integrate_once(problem, n, p0, opts.gl_points, false, true);
    for (int panels = 2 * p0; panels <= opts.max_panels; panels *= 2) {
        const SampledIntegral cur = integrate_once(problem, n, panels, opts.gl_points, false, true);
        const double floor = 1e-10 * cur.grad_l1 + 1e-280;
        if ((cur.grad - prev.grad).cwiseAbs().maxCoeff() <=
            opts.rel_tol * cur.grad.cwiseAbs().maxCoeff() + floor)
            return cur.grad;
        prev = cur;
    }
    throw AccuracyError("compute_K: time quadrature did not converge");
}

// --- closed forms ---------------------------------------------------------------------

double fidelity_estimate(std::span<const std::complex<double>> G) {
    double s = 0.0;
    for (const auto& g : G) s += std::norm(g);
    return 1.0 - s;
}

Eigen::VectorXd gradient_estimate(std::span<const std::complex<double>> G,
                                  std::span<const Eigen::VectorXcd> K) {
    if (G.size() != K.size()) throw DomainError("gradient_estimate: G/K length mismatch");
    if (K.empty()) return Eigen::VectorXd();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(K[0].size());
    for (size_t n = 0; n < G.size(); ++n)
        out -= 2.0 * (G[n] * K[n].conjugate()).real();
    return out;
}

EstaTerms esta_correction(std::vector<std::complex<double>> G, std::vector<Eigen::VectorXcd> K,
                          Eigen::VectorXd lambda0) {
    if (G.size() != K.size()) throw DomainError("esta_correction: G/K length mismatch");
    EstaTerms terms;
    terms.N = static_cast<int>(G.size());
    terms.G = std::move(G);
    terms.K = std::move(K);
    terms.lambda0 = std::move(lambda0);

    const int dim = terms.K.empty() ? static_cast<int>(terms.lambda0.size())
                                    : static_cast<int>(terms.K[0].size());
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
    double g2 = 0.0, g_l1 = 0.0, k_max = 0.0;
    for (int n = 0; n < terms.N; ++n) {
        r += (std::conj(terms.G[n]) * terms.K[n]).real();
        g2 += std::norm(terms.G[n]);
        g_l1 += std::abs(terms.G[n]);
        k_max = std::max(k_max, terms.K[n].norm());
    }

    terms.F_estimate = 1.0 - g2;
    terms.grad_estimate = -2.0 * r;

    const double threshold = 1e-12 * g_l1 * k_max;
    if (r.norm() <= threshold || g2 == 0.0) {
        terms.degenerate = g2 != 0.0;
        terms.eps = Eigen::VectorXd::Zero(dim);
    } else {
        terms.eps = -g2 * r / r.squaredNorm();
    }
    terms.lambda_s = terms.lambda0 + terms.eps;
    return terms;
}

EstaTerms compute_esta_terms(const EstaProblem& problem, const Eigen::VectorXd& lambda0, int N,
                             const QuadOptions& opts) {
    if (N < 1) throw DomainError("compute_esta_terms: N must be >= 1");
    N = std::min(N, problem.max_modes());
    std::vector<std::complex<double>> G(N);
    std::vector<Eigen::VectorXcd> K(N);
    for (int n = 1; n <= N; ++n) {
        G[n - 1] = compute_G(problem, n, opts);
        K[n - 1] = compute_K(problem, n, opts);
    }
    return esta_correction(std::move(G), std::move(K), lambda0);
}

} // namespace esta
