// Command-line interface: construct STA/eSTA control protocols, run exact
// simulations, sweep final times and validate the numerical machinery.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 numerical-accuracy
// failure, 3 assertion (validation) failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "esta/engine.hpp"
#include "esta/errors.hpp"
#include "esta/experiments.hpp"
#include "esta/io.hpp"
#include "esta/modes.hpp"
#include "esta/oracle.hpp"
#include "esta/propagators.hpp"
#include "esta/version.hpp"

namespace {

struct CliFlags {
    std::string config_path;
    std::string case_id;
    double a = -1.0, d = -1.0, c_tilde = -1.0, omega_carrier = -1.0;
    double tf = -1.0, tf_min = -1.0, tf_max = -1.0;
    int tf_steps = -1, modes = -1, grid_points = -1, grid_points_r = -1, threads = -1;
    double dt = -1.0;
    std::string out, format, checkpoint;
    bool idealized = false;
    std::string validate_level = "fast";
};

void add_common_options(CLI::App* cmd, CliFlags& f) {
    cmd->add_option("--config", f.config_path, "key = value configuration file");
    cmd->add_option("--case", f.case_id, "two_level|single_transport|two_ion");
    cmd->add_option("--a", f.a, "trap depth U0/(hbar omega)");
    cmd->add_option("--d", f.d, "transport distance (sigma)");
    cmd->add_option("--c-tilde", f.c_tilde, "dimensionless Coulomb constant");
    cmd->add_option("--omega-carrier", f.omega_carrier, "two-level carrier frequency");
    cmd->add_option("--tf-min", f.tf_min, "sweep start (1/omega)");
    cmd->add_option("--tf-max", f.tf_max, "sweep end (1/omega)");
    cmd->add_option("--tf-steps", f.tf_steps, "number of sweep points");
    cmd->add_option("--modes", f.modes, "mode truncation N");
    cmd->add_option("--grid-points", f.grid_points, "grid points (power of two, 0 = auto)");
    cmd->add_option("--grid-points-r", f.grid_points_r, "relative-axis points (two-ion)");
    cmd->add_option("--dt", f.dt, "propagation time step (0 = auto)");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", f.out, "output path");
    cmd->add_option("--format", f.format, "csv|json");
    cmd->add_option("--checkpoint", f.checkpoint, "binary wavefunction dump path");
    cmd->add_flag("--idealized-system", f.idealized, "evolve under H_0 in place of H_S");
}

esta::RunConfig build_config(const CliFlags& f) {
    esta::RunConfig cfg;
    if (!f.config_path.empty()) cfg = esta::parse_config(f.config_path);
    if (!f.case_id.empty()) cfg.case_id = f.case_id;
    if (f.a > 0) cfg.a = f.a;
    if (f.d >= 0) cfg.d = f.d;
    if (f.c_tilde > 0) cfg.C_tilde = f.c_tilde;
    if (f.omega_carrier > 0) cfg.omega_carrier = f.omega_carrier;
    if (f.tf > 0) {
        cfg.tf_min = f.tf;
        cfg.tf_max = f.tf;
        cfg.tf_steps = 1;
    }
    if (f.tf_min > 0) cfg.tf_min = f.tf_min;
    if (f.tf_max > 0) cfg.tf_max = f.tf_max;
    if (f.tf_steps > 0) cfg.tf_steps = f.tf_steps;
    if (f.modes > 0) cfg.n_modes = f.modes;
    if (f.grid_points >= 0) cfg.grid_points = f.grid_points;
    if (f.grid_points_r >= 0) cfg.grid_points_r = f.grid_points_r;
    if (f.dt >= 0) cfg.dt = f.dt;
    if (f.threads >= 0) cfg.threads = f.threads;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.format.empty()) cfg.format = f.format;
    if (!f.checkpoint.empty()) cfg.checkpoint = f.checkpoint;
    if (f.idealized) cfg.idealized_system = true;
    esta::finalize_config(cfg);
    return cfg;
}

void print_vector(const char* name, const Eigen::VectorXd& v) {
    std::printf("%s =", name);
    for (int i = 0; i < v.size(); ++i) std::printf(" %.17g", v[i]);
    std::printf("\n");
}

int cmd_correct(const CliFlags& flags) {
    const esta::RunConfig cfg = build_config(flags);
    const esta::CaseModel model = esta::model_from_config(cfg);
    const double t_f = cfg.tf_min;
    const auto problem = esta::make_problem(model, t_f, cfg.gh_nodes);
    Eigen::VectorXd lambda0 = Eigen::VectorXd::Zero(problem->control_dim());
    if (model.id != esta::CaseId::TwoLevel) {
        const auto* tp = dynamic_cast<const esta::TransportProblem*>(problem.get());
        lambda0 = esta::transport_lambda0(tp->modes().trajectory());
    }
    esta::QuadOptions quad;
    quad.rel_tol = cfg.quad_rel_tol;
    const esta::EstaTerms terms =
        esta::compute_esta_terms(*problem, lambda0, cfg.n_modes, quad);

    std::printf("case = %s, t_f = %.17g, N = %d\n", cfg.case_id.c_str(), t_f, terms.N);
    print_vector("lambda0", terms.lambda0);
    print_vector("eps", terms.eps);
    print_vector("lambda_s", terms.lambda_s);
    for (int n = 0; n < terms.N; ++n)
        std::printf("|G_%d| = %.17g\n", n + 1, std::abs(terms.G[n]));
    std::printf("F_estimate = %.17g\n", terms.F_estimate);
    if (terms.degenerate)
        std::printf("warning: degenerate gradient, correction fell back to lambda0\n");

    if (!cfg.out.empty()) {
        nlohmann::json j{{"version", esta::kVersion},
                         {"config", esta::config_to_json(cfg)},
                         {"t_f", t_f},
                         {"N", terms.N},
                         {"F_estimate", terms.F_estimate},
                         {"degenerate", terms.degenerate}};
        j["lambda0"] = std::vector<double>(terms.lambda0.begin(), terms.lambda0.end());
        j["eps"] = std::vector<double>(terms.eps.begin(), terms.eps.end());
        j["lambda_s"] = std::vector<double>(terms.lambda_s.begin(), terms.lambda_s.end());
        nlohmann::json gs = nlohmann::json::array();
        for (const auto& g : terms.G) gs.push_back({g.real(), g.imag()});
        j["G"] = gs;
        std::ofstream out(cfg.out);
        if (!out) throw esta::DomainError("cannot open " + cfg.out);
        out << j.dump(2) << '\n';
    }
    return 0;
}

void print_record(const esta::FidelityRecord& rec) {
    std::printf("t_f = %.17g\n", rec.t_f);
    if (!rec.error.empty()) {
        std::printf("error: %s\n", rec.error.c_str());
        return;
    }
    std::printf("F_sta              = %.17g\n", rec.F_sta);
    std::printf("F_esta             = %.17g\n", rec.F_esta);
    std::printf("F_sta_idealized    = %.17g\n", rec.F_sta_idealized);
    std::printf("F_esta_idealized   = %.17g\n", rec.F_esta_idealized);
    std::printf("F_estimate         = %.17g\n", rec.F_estimate);
}

int cmd_simulate(const CliFlags& flags) {
    const esta::RunConfig cfg = build_config(flags);
    const esta::FidelityRecord rec = esta::run_case(cfg, cfg.tf_min);
    print_record(rec);
    if (!cfg.out.empty()) {
        esta::SweepResult result;
        result.config = cfg;
        result.version = esta::kVersion;
        result.rows.push_back(rec);
        esta::emit_results(result, cfg.format, cfg.out);
    }
    return rec.error.empty() ? 0 : 2;
}

int cmd_sweep(const CliFlags& flags) {
    const esta::RunConfig cfg = build_config(flags);
    const esta::SweepResult result = esta::sweep_tf(cfg);
    if (!cfg.out.empty())
        esta::emit_results(result, cfg.format, cfg.out);
    else
        std::fputs(esta::results_to_csv(result).c_str(), stdout);
    for (const auto& row : result.rows)
        if (!row.error.empty()) {
            std::fprintf(stderr, "row t_f = %g failed: %s\n", row.t_f, row.error.c_str());
            return 2;
        }
    return 0;
}

int cmd_threshold(const CliFlags& flags) {
    const esta::RunConfig cfg = build_config(flags);
    const esta::SweepResult result = esta::sweep_tf(cfg);
    const auto t_sta = esta::threshold_time(result, esta::SchemeKind::Sta);
    const auto t_esta = esta::threshold_time(result, esta::SchemeKind::Esta);
    auto show = [](const char* name, const std::optional<double>& t) {
        if (t)
            std::printf("t_0.99(%s) = %.17g\n", name, *t);
        else
            std::printf("t_0.99(%s) = not reached\n", name);
    };
    show("sta", t_sta);
    show("esta", t_esta);
    if (!cfg.out.empty()) esta::emit_results(result, cfg.format, cfg.out);
    return 0;
}

// --- validation suite ---------------------------------------------------------

struct Validator {
    int failures = 0;
    void check(bool ok, const std::string& name) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
        if (!ok) ++failures;
    }
};

void validate_fast(Validator& v) {
    using namespace esta;
    // Scheme construction invariants.
    {
        const double t_f = 3.0;
        const auto sta = design_transport_sta(t_f, 40.0, 1.0);
        double resid = std::max(std::abs(sta.qc(0.0)), std::abs(sta.qc(t_f) - 40.0));
        for (int n = 1; n <= 4; ++n)
            resid = std::max({resid, std::abs(sta.qc.derivative(0.0, n)),
                              std::abs(sta.qc.derivative(t_f, n))});
        v.check(resid < 1e-10 * 40.0, "design_qc boundary residual < 1e-10 (scaled)");

        double aux = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double t = t_f * i / 200.0;
            aux = std::max(aux, std::abs(sta.qc_ddot(t) + (sta.qc(t) - sta.q0_sta(t))));
        }
        v.check(aux < 1e-10 * 40.0, "auxiliary equation residual < 1e-10 (scaled)");

        double sym = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double t = t_f * i / 100.0;
            sym = std::max(sym, std::abs(sta.q0_sta(t_f - t) - (40.0 - sta.q0_sta(t))));
        }
        v.check(sym < 1e-10 * 40.0, "STA trajectory symmetry");
    }
    // Engine identities on the two-level case.
    {
        const CaseModel model = two_level_model(20.0);
        TwoLevelProblem problem(model, 1.0);
        const EstaTerms terms = compute_esta_terms(problem, Eigen::VectorXd::Zero(8), 1);
        const Eigen::VectorXd grad = terms.grad_estimate;
        const double gap = 2.0 * (1.0 - terms.F_estimate);
        const Eigen::VectorXd eps_parab = gap * grad / grad.squaredNorm();
        v.check((eps_parab - terms.eps).cwiseAbs().maxCoeff() <=
                    1e-12 * terms.eps.cwiseAbs().maxCoeff(),
                "parabolic-form and closed-form corrections agree to 1e-12");
        v.check(terms.F_estimate <= 1.0, "fidelity estimate bounded by one");
    }
    // Mode orthonormality.
    {
        const TwoLevelScheme base = build_two_level_scheme(ControlVector::zero(8), 1.0);
        std::vector<double> times;
        for (int i = 0; i <= 50; ++i) times.push_back(i / 50.0);
        const TwoLevelModes modes = two_level_modes(base, 1.0, times);
        double err = 0.0;
        for (size_t i = 0; i < times.size(); ++i) {
            err = std::max(err, std::abs((modes.chi0[i].adjoint() * modes.chi1[i])(0)));
            err = std::max(err, std::abs(modes.chi0[i].norm() - 1.0));
        }
        v.check(err < 1e-8, "two-level mode orthonormality < 1e-8");
    }
    // Propagator basics.
    {
        Grid1d grid{-12.0, 12.0, 256};
        WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 1.0);
        split_step_1d(psi, pointwise_potential([](double x, double) { return 0.5 * x * x; }), 1.0, 2.0, 2000);
        double center = 0.0;
        for (int i = 0; i < grid.n; ++i) center += std::norm(psi.amp[i]) * grid.x(i) * grid.dx();
        v.check(std::abs(center - std::cos(2.0)) < 1e-6,
                "coherent-state centre follows cos(omega t) within 1e-6");
        v.check(std::abs(psi.norm() - 1.0) < 1e-10, "norm conserved < 1e-10");
    }
}

void validate_full(Validator& v) {
    using namespace esta;
    validate_fast(v);
    // Truncation stability for single-particle transport.
    {
        RunConfig cfg;
        cfg.case_id = "single_transport";
        cfg.a = 1e4;
        cfg.d = 100.0;
        cfg.tf_min = 12.0;
        cfg.tf_max = 12.0;
        cfg.tf_steps = 1;
        finalize_config(cfg);
        const TruncationComparison cmp = compare_truncation(cfg, 12.0);
        v.check(cmp.max_rel_deviation < 1e-3, "transport eps(N=1) vs eps(N=2) within 1e-3");
    }
    // Harmonic ground state by imaginary time.
    {
        Grid1d grid{-10.0, 10.0, 256};
        const WaveFunction1d gs =
            ground_state_1d([](double x) { return 0.5 * x * x; }, 1.0, grid, 0.0, 1.0);
        const double e = energy_1d(gs, [](double x) { return 0.5 * x * x; }, 1.0);
        v.check(std::abs(e - 0.5) < 1e-8, "harmonic ground-state energy 1/2 within 1e-8");
    }
    // Split-step order-2 convergence.
    {
        Grid1d grid{-12.0, 12.0, 256};
        auto run = [&](int steps) {
            WaveFunction1d psi = oscillator_ground_state(grid, 1.0, 1.0, 1.5);
            split_step_1d(psi, pointwise_potential([](double x, double) { return 0.5 * x * x; }), 1.0, 1.0, steps);
            return psi;
        };
        const WaveFunction1d ref = run(16384);
        const double e1 = (run(128).amp - ref.amp).norm();
        const double e2 = (run(256).amp - ref.amp).norm();
        v.check(e1 / e2 > 3.5 && e1 / e2 < 4.5, "split-step order-2 convergence ratio in [3.5, 4.5]");
    }
    // Equilibrium distance closed form vs numerical minimization.
    {
        const CaseModel model = two_ion_model(1e5, 100.0, 7.35e7);
        const double closed = equilibrium_distance(model);
        double lo = 0.5 * closed, hi = 2.0 * closed;
        auto rel = [&](double r) { return model.mass * r * r + model.C_tilde / (2.0 * r); };
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            (rel(m1) < rel(m2) ? hi : lo) = (rel(m1) < rel(m2) ? m2 : m1);
        }
        const double numeric = 0.5 * (lo + hi);
        v.check(std::abs(closed - numeric) < 1e-6 * closed,
                "equilibrium distance matches minimization within 1e-6");
    }
}

int cmd_validate(const CliFlags& flags) {
    Validator v;
    try {
        if (flags.validate_level == "full")
            validate_full(v);
        else
            validate_fast(v);
    } catch (const esta::AccuracyError& e) {
        std::fprintf(stderr, "accuracy error: %s\n", e.what());
        return 2;
    }
    if (v.failures > 0) {
        std::fprintf(stderr, "%d validation check(s) failed\n", v.failures);
        return 3;
    }
    std::printf("all validation checks passed\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"enhanced shortcuts-to-adiabaticity toolkit"};
    app.set_version_flag("--version", esta::kVersion);
    app.require_subcommand(1);

    CliFlags flags;
    CLI::App* correct = app.add_subcommand("correct", "print lambda0, eps and lambda_s");
    CLI::App* simulate = app.add_subcommand("simulate", "single exact run at --tf");
    CLI::App* sweep = app.add_subcommand("sweep", "fidelity versus final time");
    CLI::App* threshold = app.add_subcommand("threshold", "threshold times t_0.99");
    CLI::App* validate = app.add_subcommand("validate", "run the invariant suites");
    for (CLI::App* cmd : {correct, simulate, sweep, threshold}) add_common_options(cmd, flags);
    correct->add_option("--tf", flags.tf, "final time (1/omega)");
    simulate->add_option("--tf", flags.tf, "final time (1/omega)");
    validate->add_option("--validate-level", flags.validate_level, "fast|full");

    CLI11_PARSE(app, argc, argv);

    try {
        if (correct->parsed()) return cmd_correct(flags);
        if (simulate->parsed()) return cmd_simulate(flags);
        if (sweep->parsed()) return cmd_sweep(flags);
        if (threshold->parsed()) return cmd_threshold(flags);
        if (validate->parsed()) return cmd_validate(flags);
    } catch (const esta::ParseError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    } catch (const esta::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const esta::AccuracyError& e) {
        std::fprintf(stderr, "accuracy error: %s\n", e.what());
        return 2;
    } catch (const esta::GridError& e) {
        std::fprintf(stderr, "grid error: %s\n", e.what());
        return 2;
    } catch (const esta::ConvergenceError& e) {
        std::fprintf(stderr, "convergence error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 2;
    }
    return 0;
}
