#include "esta/oracle.hpp"

#include <cmath>

#include "esta/errors.hpp"
#include "esta/quadrature.hpp"

namespace esta {

PerturbativeOracle::PerturbativeOracle(const TransportProblem& problem) : problem_(problem) {
    basis_.reserve(6);
    for (int j = 1; j <= 6; ++j) basis_.push_back(knot_basis(j, 6, problem.t_f()));
}

std::complex<double> PerturbativeOracle::alpha(int j, int n, int m, double t) const {
    if (j < 1 || j > 2) throw DomainError("PerturbativeOracle::alpha: order must be 1 or 2");
    if (n < 0 || m < 0) throw DomainError("PerturbativeOracle::alpha: negative mode index");
    const TransportModes& modes = problem_.modes();
    const TransportTrajectory& traj = modes.trajectory();
    const double shift = traj.qc(t) - traj.q0(t);
    double integral = 0.0;
    for (double off : problem_.offsets())
        integral += modes.oscillator_integral(n, m, [&](double u) {
            return mu_expansion_term(j, u + shift + off, problem_.model().mass);
        });
    return std::polar(1.0, (n - m) * modes.omega() * t) * integral;
}

Eigen::VectorXcd PerturbativeOracle::beta(int j, int n, int m, double t) const {
    if (j < 0 || j > 2) throw DomainError("PerturbativeOracle::beta: order must be 0, 1 or 2");
    if (n < 0 || m < 0) throw DomainError("PerturbativeOracle::beta: negative mode index");
    const TransportModes& modes = problem_.modes();
    const TransportTrajectory& traj = modes.trajectory();
    const double shift = traj.qc(t) - traj.q0(t);
    double force = 0.0;
    for (double off : problem_.offsets())
        force += modes.oscillator_integral(n, m, [&](double u) {
            return mu_expansion_term_deriv(j, u + shift + off, problem_.model().mass);
        });
    const std::complex<double> elem =
        -std::polar(1.0, (n - m) * modes.omega() * t) * force;
    Eigen::VectorXcd row(6);
    for (int k = 0; k < 6; ++k) row[k] = elem * basis_[k](t);
    return row;
}

namespace {

// Adaptive composite Gauss-Legendre time integral of a complex-valued sample,
// same refinement policy as the engine quadrature.
template <class F>
std::complex<double> adaptive_time_integral(F&& f, double t_f, int p0, const QuadOptions& opts) {
    auto evaluate = [&](int panels) {
        const CompositeRule rule = composite_gauss_legendre(0.0, t_f, panels, opts.gl_points);
        std::complex<double> acc = 0.0;
        double l1 = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const std::complex<double> v = f(rule.nodes[i]);
            acc += rule.weights[i] * v;
            l1 += rule.weights[i] * std::abs(v);
        }
        return std::pair{acc, l1};
    };
    auto [prev, prev_l1] = evaluate(p0);
    for (int panels = 2 * p0; panels <= opts.max_panels; panels *= 2) {
        auto [cur, l1] = evaluate(panels);
        if (std::abs(cur - prev) <= opts.rel_tol * std::abs(cur) + 1e-10 * l1 + 1e-280)
            return cur;
        prev = cur;
    }
    throw AccuracyError("PerturbativeOracle: time quadrature did not converge");
}

} // namespace

std::complex<double> PerturbativeOracle::alpha_integral(int j, int n,
                                                        const QuadOptions& opts) const {
    const int p0 =
        opts.initial_panels > 0 ? opts.initial_panels : problem_.recommended_panels(n);
    return adaptive_time_integral([&](double t) { return alpha(j, n, 0, t); }, problem_.t_f(),
                                  p0, opts);
}

Eigen::VectorXcd PerturbativeOracle::beta_integral(int j, int n, const QuadOptions& opts) const {
    const int p0 =
        opts.initial_panels > 0 ? opts.initial_panels : problem_.recommended_panels(n);
    Eigen::VectorXcd out(6);
    for (int k = 0; k < 6; ++k)
        out[k] = adaptive_time_integral([&](double t) { return beta(j, n, 0, t)[k]; },
                                        problem_.t_f(), p0, opts);
    return out;
}

double PerturbativeOracle::F2(int N, const QuadOptions& opts) const {
    double acc = 0.0;
    for (int n = 1; n <= N; ++n) acc -= std::norm(alpha_integral(1, n, opts));
    return acc;
}

double PerturbativeOracle::F3_approx(int N, const QuadOptions& opts) const {
    double acc = 0.0;
    for (int n = 1; n <= N; ++n) {
        const std::complex<double> i1 = alpha_integral(1, n, opts);
        const std::complex<double> i2 = alpha_integral(2, n, opts);
        acc -= 2.0 * std::real(std::conj(i1) * i2);
    }
    return acc;
}

Eigen::VectorXd PerturbativeOracle::gradF1(int N, const QuadOptions& opts) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(6);
    for (int n = 1; n <= N; ++n) {
        const std::complex<double> ia = alpha_integral(1, n, opts);
        const Eigen::VectorXcd ib = beta_integral(0, n, opts);
        acc -= 2.0 * (ia * ib.conjugate()).real();
    }
    return acc;
}

Eigen::VectorXd PerturbativeOracle::gradF2_approx(int N, const QuadOptions& opts) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(6);
    for (int n = 1; n <= N; ++n) {
        const std::complex<double> ia1 = alpha_integral(1, n, opts);
        const std::complex<double> ia2 = alpha_integral(2, n, opts);
        const Eigen::VectorXcd ib0 = beta_integral(0, n, opts);
        const Eigen::VectorXcd ib1 = beta_integral(1, n, opts);
        acc -= 2.0 * (ib1.conjugate() * ia1 + ib0.conjugate() * ia2).real();
    }
    return acc;
}

double PerturbativeOracle::neglected_triple_integral_proxy(int N, const QuadOptions& opts) const {
    double acc = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double m = std::abs(alpha_integral(1, n, opts));
        acc += m * m * m;
    }
    return acc;
}

} // namespace esta
