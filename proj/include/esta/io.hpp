#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace esta {

// Run configuration. All fields have documented defaults; unset keys fall
// back to case-dependent values resolved by finalize_config().
struct RunConfig {
    std::string case_id = "single_transport"; // two_level | single_transport | two_ion
    double a = 1e5;              // trap depth U_0/(hbar omega)
    double d = 1562.0;           // transport distance (sigma)
    double C_tilde = 7.35e7;     // dimensionless Coulomb constant (two-ion)
    double omega_carrier = 40.0; // two-level carrier frequency (omega units)
    int n_modes = 1;             // truncation N
    double tf_min = 0.0;         // 0: case default
    double tf_max = 0.0;
    int tf_steps = 12;
    int grid_points = 0;   // 0: auto-sized power of two
    int grid_points_r = 0; // two-ion relative axis; 0: auto
    double grid_pad = 12.0;
    double dt = 0.0; // 0: min(0.002/omega, dx^2 m / pi)
    int gh_nodes = 64;
    double quad_rel_tol = 1e-8;
    int threads = 0; // 0: hardware concurrency
    std::string out;
    std::string format = "csv"; // csv | json
    bool idealized_system = false; // evolve under H_0 in place of H_S (mu_s = 0)
    std::string checkpoint; // optional final-wavefunction dump path
    int verbosity = 1;

    bool operator==(const RunConfig&) const = default;
};

// Parses a flat key = value config file ('#' comments); unknown keys and type
// mismatches raise ParseError naming the key.
RunConfig parse_config(const std::string& path);

// Applies case-dependent defaults for unset fields and checks all invariants
// (positive physical parameters, increasing t_f grid, power-of-two points).
void finalize_config(RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

struct SweepResult;

// CSV columns: t_f,F_sta,F_esta,F_esta_idealized,F_sta_idealized with 17
// significant digits; a JSON sidecar (path + ".json") carries the full config
// echo, correction vectors, version and timings. format == "json" writes a
// single JSON document at `path`.
void emit_results(const SweepResult& result, const std::string& format, const std::string& path);

std::string results_to_csv(const SweepResult& result);
nlohmann::json results_to_json(const SweepResult& result);

} // namespace esta
