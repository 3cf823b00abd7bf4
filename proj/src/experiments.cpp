#include "esta/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "esta/errors.hpp"
#include "esta/propagators.hpp"
#include "esta/version.hpp"

namespace esta {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

int next_pow2(double x) {
    int n = 2;
    while (n < x) {
        if (n >= (1 << 22)) throw GridError("grid sizing: required point count too large");
        n <<= 1;
    }
    return n;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// --- per-row scheme/correction preparation (grid-free) -------------------------

struct RowPrep {
    double t_f = 0.0;
    EstaTerms terms;
    // transport
    TransportTrajectory sta_traj, esta_traj;
    // two-level
    TwoLevelScheme sta_scheme, esta_scheme;
    std::string error;
};

QuadOptions quad_options(const RunConfig& config) {
    QuadOptions q;
    q.rel_tol = config.quad_rel_tol;
    return q;
}

RowPrep prepare_row(const RunConfig& config, const CaseModel& model, double t_f) {
    RowPrep prep;
    prep.t_f = t_f;
    const QuadOptions quad = quad_options(config);
    if (model.id == CaseId::TwoLevel) {
        TwoLevelProblem problem(model, t_f);
        prep.terms = compute_esta_terms(problem, Eigen::VectorXd::Zero(8), config.n_modes, quad);
        prep.sta_scheme = build_two_level_scheme(ControlVector::zero(8), t_f);
        prep.esta_scheme = build_two_level_scheme({prep.terms.eps}, t_f);
    } else {
        TransportProblem problem(model, t_f, config.gh_nodes);
        const Eigen::VectorXd lambda0 = transport_lambda0(problem.modes().trajectory());
        prep.terms = compute_esta_terms(problem, lambda0, config.n_modes, quad);
        prep.sta_traj = problem.modes().trajectory();
        prep.esta_traj =
            build_transport_scheme({prep.terms.eps}, t_f, model.d, model.idealized_omega());
    }
    return prep;
}

// --- grid sizing -----------------------------------------------------------------

struct TrajectoryScan {
    double q0_lo = 0.0, q0_hi = 0.0;
    double vmax = 0.0;
    double off_max = 0.0; // max |q_c - q_0|
};

TrajectoryScan scan_trajectory(const TransportTrajectory& traj) {
    TrajectoryScan s;
    const Polynomial q0dot = (traj.q0_sta + traj.correction).derivative_poly(1);
    const int samples = 1024;
    for (int i = 0; i <= samples; ++i) {
        const double t = traj.t_f * i / samples;
        const double q0 = traj.q0(t);
        s.q0_lo = std::min(s.q0_lo, q0);
        s.q0_hi = std::max(s.q0_hi, q0);
        s.vmax = std::max({s.vmax, std::abs(q0dot(t)), std::abs(traj.qc_dot(t))});
        s.off_max = std::max(s.off_max, std::abs(traj.qc(t) - q0));
    }
    return s;
}

Grid1d size_com_grid(const RunConfig& config, const CaseModel& model,
                     std::span<const TransportTrajectory> trajs) {
    TrajectoryScan merged;
    merged.q0_hi = model.d;
    for (const auto& traj : trajs) {
        const TrajectoryScan s = scan_trajectory(traj);
        merged.q0_lo = std::min(merged.q0_lo, s.q0_lo);
        merged.q0_hi = std::max(merged.q0_hi, s.q0_hi);
        merged.vmax = std::max(merged.vmax, s.vmax);
        merged.off_max = std::max(merged.off_max, s.off_max);
    }
    const double omega = model.idealized_omega();
    const double width = 1.0 / std::sqrt(model.mass * omega);
    const double lo = merged.q0_lo - config.grid_pad;
    const double hi = merged.q0_hi + config.grid_pad;
    // Momentum demand: packet momentum (mass * velocity, including sloshing at
    // the trap frequency over the trap-to-packet offset) plus the momentum
    // width of the ground state.
    const double k_need =
        1.15 * model.mass * (merged.vmax + omega * merged.off_max) + 6.5 / width + 4.0;
    double dx = M_PI / k_need;
    dx = std::min(dx, 0.25 * std::min(1.0, width));
    Grid1d grid;
    grid.min = lo;
    grid.max = hi;
    grid.n = config.grid_points > 0 ? config.grid_points : next_pow2((hi - lo) / dx);
    validate_grid(grid);
    return grid;
}

Grid1d size_relative_grid(const RunConfig& config, const CaseModel& model, double dx_c) {
    const double r_eq = equilibrium_distance(model);
    // Relative curvature at r_eq: 2 M + C/r^3 = 6 M, so Omega_r = sqrt(6).
    const double width_r = 1.0 / std::sqrt(model.mass * std::sqrt(6.0));
    const double r_min = r_eq / 4.0; // hard wall; Coulomb suppresses amplitude
    const double r_hi = r_eq + std::max(8.0 * width_r, 4.0);
    double dx_target = std::min(0.25, M_PI / (6.5 / width_r + 6.0));
    // Relative spacing locked to an integer multiple of the c spacing so the
    // shifted-argument potential can be tabulated on a single 1D grid.
    const int rho = std::max(1, static_cast<int>(std::lround(dx_target / dx_c)));
    const double dx = rho * dx_c;
    Grid1d grid;
    grid.min = r_min;
    grid.n = config.grid_points_r > 0 ? config.grid_points_r
                                      : next_pow2((r_hi - r_min) / dx);
    grid.max = r_min + grid.n * dx;
    validate_grid(grid);
    return grid;
}

double dt_for(const RunConfig& config, double dx, double mass) {
    if (config.dt > 0.0) return config.dt;
    return std::min(0.002, dx * dx * mass / M_PI);
}

int steps_for(double t_f, double dt) {
    return std::max(1, static_cast<int>(std::ceil(t_f / dt)));
}

// --- two-ion potential with shifted-argument tables ---------------------------------

class TwoIonPotential final : public Potential2d {
public:
    TwoIonPotential(const CaseModel& model, std::function<double(double)> q0)
        : model_(model), q0_(std::move(q0)) {}

    double value(double xc, double xr, double t) const override {
        const double q0 = q0_(t);
        return profile(xc + xr - q0) + profile(xc - xr - q0) +
               model_.C_tilde / (2.0 * xr);
    }

    void fill_exp(double t, std::complex<double> factor, const Grid2d& grid,
                  Eigen::MatrixXcd& out) const override {
        const int nc = grid.c.n, nr = grid.r.n;
        out.resize(nc, nr);
        const double hc = grid.c.dx();
        const double ratio = grid.r.dx() / hc;
        const int rho = static_cast<int>(std::lround(ratio));
        if (std::abs(ratio - rho) > 1e-9) {
            Potential2d::fill_exp(t, factor, grid, out);
            return;
        }
        const double q0 = q0_(t);
        const int shift = rho * (nr - 1);
        const int m_count = nc + shift;
        // x_c + x_r - q0 = base_p + (i + rho j) hc;  x_c - x_r - q0 = base_m + (i - rho j) hc
        const double base_p = grid.c.min + grid.r.min - q0;
        const double base_m = grid.c.min - grid.r.min - q0;
        plus_.resize(m_count);
        minus_.resize(m_count);
        for (int m = 0; m < m_count; ++m) {
            plus_[m] = std::exp(factor * profile(base_p + m * hc));
            minus_[m] = std::exp(factor * profile(base_m + (m - shift) * hc));
        }
        if (factor != coulomb_factor_ || coulomb_.size() != nr) {
            coulomb_.resize(nr);
            for (int j = 0; j < nr; ++j)
                coulomb_[j] = std::exp(factor * model_.C_tilde / (2.0 * grid.r.x(j)));
            coulomb_factor_ = factor;
        }
        for (int j = 0; j < nr; ++j) {
            const std::complex<double> cj = coulomb_[j];
            const int op = rho * j;
            const int om = shift - rho * j;
            std::complex<double>* col = out.col(j).data();
            for (int i = 0; i < nc; ++i) col[i] = plus_[op + i] * minus_[om + i] * cj;
        }
    }

private:
    double profile(double y) const {
        return model_.mu_zero ? harmonic_potential(y, model_.mass)
                              : gaussian_potential(y, model_.a, model_.mass);
    }

    CaseModel model_;
    std::function<double(double)> q0_;
    mutable std::vector<std::complex<double>> plus_, minus_, coulomb_;
    mutable std::complex<double> coulomb_factor_{0.0, 0.0};
};

// --- shared (per-sweep) states -------------------------------------------------------

struct SharedStates {
    // single-particle
    Grid1d grid1;
    WaveFunction1d psi0_1d, target_1d;
    // two-ion
    Grid2d grid2;
    WaveFunction2d psi0_2d, target_2d;
};

SharedStates prepare_shared(const RunConfig& config, const CaseModel& model,
                            std::span<const TransportTrajectory> trajs) {
    SharedStates shared;
    if (model.id == CaseId::SingleTransport) {
        shared.grid1 = size_com_grid(config, model, trajs);
        auto profile = [&](double x) {
            return model.mu_zero ? harmonic_potential(x, model.mass)
                                 : gaussian_potential(x, model.a, model.mass);
        };
        shared.psi0_1d = ground_state_1d(profile, model.mass, shared.grid1, 0.0, 1.0);
        shared.target_1d = translated(shared.psi0_1d, model.d);
    } else if (model.id == CaseId::TwoIon) {
        shared.grid2.c = size_com_grid(config, model, trajs);
        shared.grid2.r = size_relative_grid(config, model, shared.grid2.c.dx());
        const TwoIonPotential static_pot(model, [](double) { return 0.0; });
        const double r_eq = equilibrium_distance(model);
        GroundStateOptions opts;
        opts.energy_stride = 4;
        shared.psi0_2d = ground_state_2d(static_pot, model.mass, shared.grid2, 0.0, r_eq,
                                         1.0 / std::sqrt(model.mass), opts);
        shared.target_2d = translated_c(shared.psi0_2d, model.d);
    }
    return shared;
}

// --- row execution ----------------------------------------------------------------------

FidelityRecord base_record(const RowPrep& prep) {
    FidelityRecord rec;
    rec.t_f = prep.t_f;
    rec.lambda0 = prep.terms.lambda0;
    rec.eps = prep.terms.eps;
    rec.G = prep.terms.G;
    rec.F_estimate = prep.terms.F_estimate;
    rec.degenerate = prep.terms.degenerate;
    return rec;
}

FidelityRecord run_two_level_row(const RunConfig& config, const CaseModel& model,
                                 const RowPrep& prep) {
    FidelityRecord rec = base_record(prep);
    const double t_f = prep.t_f;
    const double w = model.omega_carrier;
    StepControl ctrl;
    ctrl.max_step = std::min(t_f / 4096.0, 1.0 / (16.0 * w));

    const Eigen::Vector2cd psi0(1.0, 0.0);
    const Eigen::Vector2cd target(0.0, 1.0);
    auto evolve = [&](const TwoLevelScheme& scheme, HamKind kind) {
        const HamKind effective =
            (model.mu_zero && kind == HamKind::System) ? HamKind::Idealized : kind;
        auto h = [&, effective](double t) { return two_level_H(effective, scheme, w, t); };
        return fidelity(target, propagate_two_level(h, psi0, t_f, ctrl));
    };
    rec.F_sta = evolve(prep.sta_scheme, HamKind::System);
    rec.F_esta = evolve(prep.esta_scheme, HamKind::System);
    rec.F_sta_idealized = evolve(prep.sta_scheme, HamKind::Idealized);
    rec.F_esta_idealized = evolve(prep.esta_scheme, HamKind::Idealized);
    return rec;
}

FidelityRecord run_single_row(const RunConfig& config, const CaseModel& model,
                              const RowPrep& prep, const SharedStates& shared) {
    FidelityRecord rec = base_record(prep);
    const double t_f = prep.t_f;
    const double dt = dt_for(config, shared.grid1.dx(), model.mass);
    const int steps = steps_for(t_f, dt);

    auto system_potential = [&](const TransportTrajectory& traj) -> TimePotential1d {
        return [&model, &traj](double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
            const double q0 = traj.q0(t);
            if (model.mu_zero)
                out = 0.5 * model.mass * (x - q0).square();
            else
                out = model.a *
                      (1.0 - (-(0.5 * model.mass / model.a) * (x - q0).square()).exp());
        };
    };
    auto system_fidelity = [&](const TransportTrajectory& traj) {
        WaveFunction1d psi = shared.psi0_1d;
        split_step_1d(psi, system_potential(traj), model.mass, t_f, steps);
        return fidelity(psi, shared.target_1d);
    };
    auto idealized_fidelity = [&](const TransportTrajectory& traj) {
        TimePotential1d v = [&](double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
            out = 0.5 * model.mass * (x - traj.q0(t)).square();
        };
        WaveFunction1d psi = oscillator_ground_state(shared.grid1, model.mass, 1.0, 0.0);
        split_step_1d(psi, v, model.mass, t_f, steps);
        return fidelity(psi, oscillator_ground_state(shared.grid1, model.mass, 1.0, model.d));
    };
    rec.F_sta = system_fidelity(prep.sta_traj);
    rec.F_esta = system_fidelity(prep.esta_traj);
    rec.F_sta_idealized = idealized_fidelity(prep.sta_traj);
    rec.F_esta_idealized = idealized_fidelity(prep.esta_traj);

    if (!config.checkpoint.empty()) {
        WaveFunction1d psi = shared.psi0_1d;
        split_step_1d(psi, system_potential(prep.esta_traj), model.mass, t_f, steps);
        write_wavefunction(config.checkpoint, psi);
    }
    return rec;
}

FidelityRecord run_two_ion_row(const RunConfig& config, const CaseModel& model,
                               const RowPrep& prep, const SharedStates& shared) {
    FidelityRecord rec = base_record(prep);
    const double t_f = prep.t_f;
    const double dt = dt_for(config, shared.grid2.c.dx(), model.mass);
    const int steps = steps_for(t_f, dt);
    const double omega_com = model.idealized_omega();

    auto system_fidelity = [&](const TransportTrajectory& traj) {
        TwoIonPotential pot(model, [&](double t) { return traj.q0(t); });
        WaveFunction2d psi = shared.psi0_2d;
        split_step_2d(psi, pot, model.mass, t_f, steps);
        return fidelity(psi, shared.target_2d);
    };
    // H_0 is separable; the relative part is stationary, so the idealized
    // fidelity reduces to the centre-of-mass transport fidelity.
    auto idealized_fidelity = [&](const TransportTrajectory& traj) {
        TimePotential1d v = [&](double t, const Eigen::ArrayXd& x, Eigen::ArrayXd& out) {
            out = model.mass * (x - traj.q0(t)).square();
        };
        WaveFunction1d psi =
            oscillator_ground_state(shared.grid2.c, model.mass, omega_com, 0.0);
        split_step_1d(psi, v, model.mass, t_f, steps);
        return fidelity(
            psi, oscillator_ground_state(shared.grid2.c, model.mass, omega_com, model.d));
    };
    rec.F_sta = system_fidelity(prep.sta_traj);
    rec.F_esta = system_fidelity(prep.esta_traj);
    rec.F_sta_idealized = idealized_fidelity(prep.sta_traj);
    rec.F_esta_idealized = idealized_fidelity(prep.esta_traj);

    if (!config.checkpoint.empty()) {
        TwoIonPotential pot(model, [&](double t) { return prep.esta_traj.q0(t); });
        WaveFunction2d psi = shared.psi0_2d;
        split_step_2d(psi, pot, model.mass, t_f, steps);
        write_wavefunction(config.checkpoint, psi);
    }
    return rec;
}

FidelityRecord run_row(const RunConfig& config, const CaseModel& model, const RowPrep& prep,
                       const SharedStates& shared) {
    const double start = now_seconds();
    FidelityRecord rec;
    switch (model.id) {
        case CaseId::TwoLevel: rec = run_two_level_row(config, model, prep); break;
        case CaseId::SingleTransport: rec = run_single_row(config, model, prep, shared); break;
        case CaseId::TwoIon: rec = run_two_ion_row(config, model, prep, shared); break;
    }
    rec.wall_seconds = now_seconds() - start;
    return rec;
}

std::vector<const TransportTrajectory*> collect_trajectories(std::span<const RowPrep> preps) {
    std::vector<const TransportTrajectory*> out;
    for (const auto& p : preps) {
        if (!p.error.empty()) continue;
        out.push_back(&p.sta_traj);
        out.push_back(&p.esta_traj);
    }
    return out;
}

SharedStates prepare_shared_from_preps(const RunConfig& config, const CaseModel& model,
                                       std::span<const RowPrep> preps) {
    if (model.id == CaseId::TwoLevel) return {};
    std::vector<TransportTrajectory> trajs;
    for (const TransportTrajectory* t : collect_trajectories(preps)) trajs.push_back(*t);
    if (trajs.empty()) throw DomainError("sweep: no usable rows");
    return prepare_shared(config, model, trajs);
}

} // namespace

CaseModel model_from_config(const RunConfig& config) {
    CaseModel model;
    if (config.case_id == "two_level") {
        model = two_level_model(config.omega_carrier);
    } else if (config.case_id == "single_transport") {
        model = single_transport_model(config.a, config.d);
    } else if (config.case_id == "two_ion") {
        model = two_ion_model(config.a, config.d, config.C_tilde);
    } else {
        throw DomainError("unknown case id: " + config.case_id);
    }
    model.mu_zero = config.idealized_system;
    return model;
}

FidelityRecord run_case(const RunConfig& config, double t_f) {
    RunConfig cfg = config;
    finalize_config(cfg);
    const CaseModel model = model_from_config(cfg);
    RowPrep prep = prepare_row(cfg, model, t_f);
    std::vector<RowPrep> preps;
    preps.push_back(std::move(prep));
    const SharedStates shared = prepare_shared_from_preps(cfg, model, preps);
    return run_row(cfg, model, preps[0], shared);
}

SweepResult sweep_tf(const RunConfig& config) {
    const double start = now_seconds();
    RunConfig cfg = config;
    finalize_config(cfg);
    const CaseModel model = model_from_config(cfg);

    std::vector<double> tf_grid;
    if (cfg.tf_steps == 1) {
        tf_grid.push_back(cfg.tf_min);
    } else {
        for (int i = 0; i < cfg.tf_steps; ++i)
            tf_grid.push_back(cfg.tf_min + (cfg.tf_max - cfg.tf_min) * i / (cfg.tf_steps - 1));
    }

    std::vector<RowPrep> preps(tf_grid.size());
    parallel_for(static_cast<int>(tf_grid.size()), cfg.threads, [&](int i) {
        try {
            preps[i] = prepare_row(cfg, model, tf_grid[i]);
        } catch (const std::exception& e) {
            preps[i].t_f = tf_grid[i];
            preps[i].error = e.what();
        }
    });

    SweepResult result;
    result.config = cfg;
    result.version = kVersion;

    SharedStates shared;
    std::string shared_error;
    try {
        shared = prepare_shared_from_preps(cfg, model, preps);
    } catch (const std::exception& e) {
        shared_error = e.what();
    }

    result.rows.resize(tf_grid.size());
    parallel_for(static_cast<int>(tf_grid.size()), cfg.threads, [&](int i) {
        if (!preps[i].error.empty() || !shared_error.empty()) {
            result.rows[i] = base_record(preps[i]);
            result.rows[i].t_f = tf_grid[i];
            result.rows[i].error = preps[i].error.empty() ? shared_error : preps[i].error;
            return;
        }
        try {
            result.rows[i] = run_row(cfg, model, preps[i], shared);
        } catch (const std::exception& e) {
            result.rows[i] = base_record(preps[i]);
            result.rows[i].error = e.what();
        }
    });

    result.wall_seconds = now_seconds() - start;
    return result;
}

std::optional<double> threshold_time(const SweepResult& sweep, SchemeKind scheme, double level) {
    std::optional<double> best;
    for (auto it = sweep.rows.rbegin(); it != sweep.rows.rend(); ++it) {
        const double f = scheme == SchemeKind::Sta ? it->F_sta : it->F_esta;
        if (it->error.empty() && f >= level)
            best = it->t_f;
        else
            break;
    }
    return best;
}

TruncationComparison compare_truncation(const RunConfig& config, double t_f) {
    RunConfig cfg = config;
    finalize_config(cfg);
    const CaseModel model = model_from_config(cfg);
    const QuadOptions quad = quad_options(cfg);
    const auto problem = make_problem(model, t_f, cfg.gh_nodes);
    Eigen::VectorXd lambda0 = Eigen::VectorXd::Zero(problem->control_dim());
    if (model.id != CaseId::TwoLevel) {
        const auto* tp = dynamic_cast<const TransportProblem*>(problem.get());
        lambda0 = transport_lambda0(tp->modes().trajectory());
    }
    TruncationComparison cmp;
    cmp.eps_n1 = compute_esta_terms(*problem, lambda0, 1, quad).eps;
    cmp.eps_n2 = compute_esta_terms(*problem, lambda0, 2, quad).eps;
    const double denom = cmp.eps_n1.norm();
    cmp.max_rel_deviation =
        denom > 0.0 ? (cmp.eps_n1 - cmp.eps_n2).norm() / denom
                    : (cmp.eps_n2.norm() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return cmp;
}

} // namespace esta
