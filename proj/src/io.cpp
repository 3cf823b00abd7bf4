#include "esta/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "esta/errors.hpp"
#include "esta/experiments.hpp"
#include "esta/propagators.hpp"
#include "esta/version.hpp"

namespace esta {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': expected a number, got '" + value + "'");
    }
    if (pos != value.size())
        throw ParseError("config key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v))
        throw ParseError("config key '" + key + "': expected an integer, got '" + value + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ParseError("config key '" + key + "': expected true/false, got '" + value + "'");
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "case") c.case_id = value;
    else if (key == "a") c.a = parse_double(key, value);
    else if (key == "d") c.d = parse_double(key, value);
    else if (key == "c_tilde") c.C_tilde = parse_double(key, value);
    else if (key == "omega_carrier") c.omega_carrier = parse_double(key, value);
    else if (key == "modes") c.n_modes = parse_int(key, value);
    else if (key == "tf_min") c.tf_min = parse_double(key, value);
    else if (key == "tf_max") c.tf_max = parse_double(key, value);
    else if (key == "tf_steps") c.tf_steps = parse_int(key, value);
    else if (key == "grid_points") c.grid_points = parse_int(key, value);
    else if (key == "grid_points_r") c.grid_points_r = parse_int(key, value);
    else if (key == "grid_pad") c.grid_pad = parse_double(key, value);
    else if (key == "dt") c.dt = parse_double(key, value);
    else if (key == "gh_nodes") c.gh_nodes = parse_int(key, value);
    else if (key == "quad_rel_tol") c.quad_rel_tol = parse_double(key, value);
    else if (key == "threads") c.threads = parse_int(key, value);
    else if (key == "out") c.out = value;
    else if (key == "format") c.format = value;
    else if (key == "idealized_system") c.idealized_system = parse_bool(key, value);
    else if (key == "checkpoint") c.checkpoint = value;
    else if (key == "verbosity") c.verbosity = parse_int(key, value);
    else throw ParseError("unknown config key '" + key + "'");
}

std::string format_17g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    RunConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void finalize_config(RunConfig& c) {
    if (c.case_id != "two_level" && c.case_id != "single_transport" && c.case_id != "two_ion")
        throw ParseError("config key 'case': must be two_level, single_transport or two_ion");
    // Case defaults for the t_f sweep window.
    if (c.tf_min == 0.0 && c.tf_max == 0.0) {
        if (c.case_id == "two_level") {
            c.tf_min = 10.0 * M_PI / c.omega_carrier;
            c.tf_max = 100.0 * M_PI / c.omega_carrier;
        } else {
            c.tf_min = 10.0;
            c.tf_max = 40.0;
        }
    }
    if (c.tf_max == 0.0) c.tf_max = c.tf_min;

    if (!(c.a > 0.0)) throw ParseError("config key 'a': must be positive");
    if (!(c.d >= 0.0)) throw ParseError("config key 'd': must be non-negative");
    if (c.case_id == "two_ion" && !(c.C_tilde > 0.0))
        throw ParseError("config key 'c_tilde': must be positive");
    if (c.case_id == "two_level" && !(c.omega_carrier > 0.0))
        throw ParseError("config key 'omega_carrier': must be positive");
    if (c.n_modes < 1) throw ParseError("config key 'modes': must be >= 1");
    if (!(c.tf_min > 0.0)) throw ParseError("config key 'tf_min': must be positive");
    if (c.tf_steps < 1) throw ParseError("config key 'tf_steps': must be >= 1");
    if (c.tf_steps > 1 && !(c.tf_max > c.tf_min))
        throw ParseError("config key 'tf_max': sweep grid must be strictly increasing");
    if (c.grid_points != 0 && !is_power_of_two(c.grid_points))
        throw ParseError("config key 'grid_points': must be a power of two");
    if (c.grid_points_r != 0 && !is_power_of_two(c.grid_points_r))
        throw ParseError("config key 'grid_points_r': must be a power of two");
    if (!(c.grid_pad >= 10.0)) throw ParseError("config key 'grid_pad': must be >= 10");
    if (c.dt < 0.0) throw ParseError("config key 'dt': must be non-negative");
    if (c.gh_nodes < 4) throw ParseError("config key 'gh_nodes': must be >= 4");
    if (!(c.quad_rel_tol > 0.0)) throw ParseError("config key 'quad_rel_tol': must be positive");
    if (c.threads < 0) throw ParseError("config key 'threads': must be non-negative");
    if (c.format != "csv" && c.format != "json")
        throw ParseError("config key 'format': must be csv or json");
}

nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{{"case", c.case_id},
                          {"a", c.a},
                          {"d", c.d},
                          {"c_tilde", c.C_tilde},
                          {"omega_carrier", c.omega_carrier},
                          {"modes", c.n_modes},
                          {"tf_min", c.tf_min},
                          {"tf_max", c.tf_max},
                          {"tf_steps", c.tf_steps},
                          {"grid_points", c.grid_points},
                          {"grid_points_r", c.grid_points_r},
                          {"grid_pad", c.grid_pad},
                          {"dt", c.dt},
                          {"gh_nodes", c.gh_nodes},
                          {"quad_rel_tol", c.quad_rel_tol},
                          {"threads", c.threads},
                          {"out", c.out},
                          {"format", c.format},
                          {"idealized_system", c.idealized_system},
                          {"checkpoint", c.checkpoint},
                          {"verbosity", c.verbosity}};
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.case_id = j.at("case").get<std::string>();
        c.a = j.at("a").get<double>();
        c.d = j.at("d").get<double>();
        c.C_tilde = j.at("c_tilde").get<double>();
        c.omega_carrier = j.at("omega_carrier").get<double>();
        c.n_modes = j.at("modes").get<int>();
        c.tf_min = j.at("tf_min").get<double>();
        c.tf_max = j.at("tf_max").get<double>();
        c.tf_steps = j.at("tf_steps").get<int>();
        c.grid_points = j.at("grid_points").get<int>();
        c.grid_points_r = j.at("grid_points_r").get<int>();
        c.grid_pad = j.at("grid_pad").get<double>();
        c.dt = j.at("dt").get<double>();
        c.gh_nodes = j.at("gh_nodes").get<int>();
        c.quad_rel_tol = j.at("quad_rel_tol").get<double>();
        c.threads = j.at("threads").get<int>();
        c.out = j.at("out").get<std::string>();
        c.format = j.at("format").get<std::string>();
        c.idealized_system = j.at("idealized_system").get<bool>();
        c.checkpoint = j.at("checkpoint").get<std::string>();
        c.verbosity = j.at("verbosity").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    return c;
}

std::string results_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "t_f,F_sta,F_esta,F_esta_idealized,F_sta_idealized\n";
    for (const FidelityRecord& row : result.rows) {
        out << format_17g(row.t_f) << ',' << format_17g(row.F_sta) << ','
            << format_17g(row.F_esta) << ',' << format_17g(row.F_esta_idealized) << ','
            << format_17g(row.F_sta_idealized) << '\n';
    }
    return out.str();
}

nlohmann::json results_to_json(const SweepResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const FidelityRecord& r : result.rows) {
        nlohmann::json row{{"t_f", r.t_f},
                           {"F_sta", r.F_sta},
                           {"F_esta", r.F_esta},
                           {"F_esta_idealized", r.F_esta_idealized},
                           {"F_sta_idealized", r.F_sta_idealized},
                           {"F_estimate", r.F_estimate},
                           {"degenerate", r.degenerate},
                           {"error", r.error},
                           {"wall_seconds", r.wall_seconds}};
        row["lambda0"] = std::vector<double>(r.lambda0.begin(), r.lambda0.end());
        row["eps"] = std::vector<double>(r.eps.begin(), r.eps.end());
        nlohmann::json gs = nlohmann::json::array();
        for (const auto& g : r.G) gs.push_back({g.real(), g.imag()});
        row["G"] = gs;
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"version", result.version},
                          {"config", config_to_json(result.config)},
                          {"wall_seconds", result.wall_seconds},
                          {"rows", rows}};
}

void emit_results(const SweepResult& result, const std::string& format, const std::string& path) {
    if (path.empty()) throw DomainError("emit_results: empty output path");
    if (format == "csv") {
        {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw DomainError("emit_results: cannot open " + path);
            out << results_to_csv(result);
            if (!out) throw DomainError("emit_results: write failed for " + path);
        }
        std::ofstream side(path + ".json", std::ios::binary);
        if (!side) throw DomainError("emit_results: cannot open " + path + ".json");
        side << results_to_json(result).dump(2) << '\n';
    } else if (format == "json") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DomainError("emit_results: cannot open " + path);
        out << results_to_json(result).dump(2) << '\n';
    } else {
        throw DomainError("emit_results: unknown format " + format);
    }
}

} // namespace esta
