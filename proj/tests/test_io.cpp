#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "esta/errors.hpp"
#include "esta/experiments.hpp"
#include "esta/io.hpp"
#include "esta/version.hpp"

using namespace esta;

namespace {

std::string write_temp(const std::string& contents) {
    const std::string path = "/tmp/esta_test_config.cfg";
    std::ofstream out(path);
    out << contents;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("empty config yields the documented single-transport defaults") {
    const std::string path = write_temp("# all defaults\n");
    RunConfig cfg = parse_config(path);
    finalize_config(cfg);
    CHECK(cfg.case_id == "single_transport");
    CHECK(cfg.a == 1e5);
    CHECK(cfg.d == 1562.0);
    CHECK(cfg.n_modes == 1);
    CHECK(cfg.tf_steps == 12);
    std::remove(path.c_str());
}

TEST_CASE("two-level default sweep covers omega t_f from 10 pi to 100 pi") {
    const std::string path = write_temp("case = two_level\nomega_carrier = 40\n");
    RunConfig cfg = parse_config(path);
    finalize_config(cfg);
    CHECK(cfg.tf_min * cfg.omega_carrier == doctest::Approx(10.0 * M_PI));
    CHECK(cfg.tf_max * cfg.omega_carrier == doctest::Approx(100.0 * M_PI));
    std::remove(path.c_str());
}

TEST_CASE("config errors name the offending key") {
    SUBCASE("negative trap depth") {
        const std::string path = write_temp("a = -3\n");
        RunConfig cfg = parse_config(path);
        CHECK_THROWS_WITH_AS(finalize_config(cfg), doctest::Contains("'a'"), ParseError);
        std::remove(path.c_str());
    }
    SUBCASE("unknown key") {
        const std::string path = write_temp("coupling = 3\n");
        CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("'coupling'"), ParseError);
        std::remove(path.c_str());
    }
    SUBCASE("type mismatch") {
        const std::string path = write_temp("tf_steps = soon\n");
        CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("'tf_steps'"), ParseError);
        std::remove(path.c_str());
    }
    SUBCASE("grid points must be powers of two") {
        const std::string path = write_temp("grid_points = 1000\n");
        RunConfig cfg = parse_config(path);
        CHECK_THROWS_WITH_AS(finalize_config(cfg), doctest::Contains("'grid_points'"),
                             ParseError);
        std::remove(path.c_str());
    }
}

TEST_CASE("single-point sweep grids are valid") {
    const std::string path = write_temp("tf_min = 5\ntf_max = 5\ntf_steps = 1\n");
    RunConfig cfg = parse_config(path);
    finalize_config(cfg);
    CHECK(cfg.tf_steps == 1);
    std::remove(path.c_str());
}

TEST_CASE("config round-trips through JSON exactly") {
    RunConfig cfg;
    cfg.case_id = "two_ion";
    cfg.a = 12345.5;
    cfg.C_tilde = 777.25;
    cfg.tf_min = 3.5;
    cfg.tf_max = 11.0;
    cfg.grid_points = 512;
    cfg.dt = 0.0025;
    cfg.idealized_system = true;
    cfg.out = "/tmp/somewhere.csv";
    const RunConfig back = config_from_json(config_to_json(cfg));
    CHECK(back == cfg);
}

TEST_CASE("emit_results writes the pinned CSV header and a parsable sidecar") {
    SweepResult result;
    result.version = kVersion;
    result.config.case_id = "single_transport";
    finalize_config(result.config);
    result.rows.resize(3);
    for (int i = 0; i < 3; ++i) {
        result.rows[i].t_f = 2.0 + i;
        result.rows[i].F_sta = 0.5 + 0.1 * i;
        result.rows[i].F_esta = 0.6 + 0.1 * i;
        result.rows[i].F_esta_idealized = 0.9999;
        result.rows[i].F_sta_idealized = 1.0;
        result.rows[i].eps = Eigen::VectorXd::Constant(6, 0.25 * i);
        result.rows[i].lambda0 = Eigen::VectorXd::Zero(6);
    }

    const std::string path = "/tmp/esta_test_out.csv";
    emit_results(result, "csv", path);

    const std::string csv = slurp(path);
    CHECK(csv.substr(0, csv.find('\n')) == "t_f,F_sta,F_esta,F_esta_idealized,F_sta_idealized");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 rows

    // Sidecar config echo reproduces the RunConfig exactly.
    const nlohmann::json side = nlohmann::json::parse(slurp(path + ".json"));
    CHECK(config_from_json(side.at("config")) == result.config);
    CHECK(side.at("rows").size() == 3);

    // Deterministic bytes across repeated emission.
    emit_results(result, "csv", path);
    CHECK(slurp(path) == csv);

    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("emit_results json format is self-contained") {
    SweepResult result;
    result.version = kVersion;
    result.config.case_id = "two_level";
    result.config.omega_carrier = 20.0;
    finalize_config(result.config);
    result.rows.resize(1);
    result.rows[0].t_f = 1.0;
    const std::string path = "/tmp/esta_test_out.json";
    emit_results(result, "json", path);
    const nlohmann::json j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("version").get<std::string>() == kVersion);
    CHECK(j.at("rows").size() == 1);
    std::remove(path.c_str());
}

TEST_SUITE_END();
