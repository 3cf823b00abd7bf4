#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "esta/engine.hpp"
#include "esta/io.hpp"

namespace esta {

enum class SchemeKind { Sta, Esta };

struct FidelityRecord {
    double t_f = 0.0;
    // Exact fidelities: scheme x Hamiltonian.
    double F_sta = std::numeric_limits<double>::quiet_NaN();
    double F_esta = std::numeric_limits<double>::quiet_NaN();
    double F_esta_idealized = std::numeric_limits<double>::quiet_NaN();
    double F_sta_idealized = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd lambda0;
    Eigen::VectorXd eps;
    std::vector<std::complex<double>> G;
    double F_estimate = 1.0; // closed-form 1 - sum |G_n|^2
    bool degenerate = false;
    std::string error; // non-empty when the row failed; sweep continues
    double wall_seconds = 0.0;
};

struct SweepResult {
    RunConfig config;
    std::string version;
    std::vector<FidelityRecord> rows;
    double wall_seconds = 0.0;
};

CaseModel model_from_config(const RunConfig& config);

// Builds modes, the eSTA correction and the exact fidelities for one final
// time. Accuracy errors from the propagators and quadratures bubble up.
FidelityRecord run_case(const RunConfig& config, double t_f);

// One record per t_f grid point; rows run independently (bounded worker
// pool) and row failures are recorded without aborting the sweep.
SweepResult sweep_tf(const RunConfig& config);

// Smallest grid t_f such that every row at or beyond it has F >= level;
// nullopt when no suffix qualifies.
std::optional<double> threshold_time(const SweepResult& sweep, SchemeKind scheme,
                                     double level = 0.99);

struct TruncationComparison {
    Eigen::VectorXd eps_n1;
    Eigen::VectorXd eps_n2;
    double max_rel_deviation = 0.0; // ||eps1 - eps2|| / ||eps1||
};
TruncationComparison compare_truncation(const RunConfig& config, double t_f);

} // namespace esta
