#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "commands.hpp"
#include "config.hpp"

using namespace seaz;
using namespace seaz::cli;

namespace {

bool has_prefix(const std::vector<std::string>& v, const std::string& prefix) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
}

std::string parse_error_path(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigParseError& e) {
        return e.path();
    }
    return "<no error>";
}

std::string parse_error_message(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "<no error>";
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("seaz_cli_test_" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("plant-only document takes and records defaults") {
        const RunConfig rc = parse_config(json::parse(R"({"plant": {"K": 141350}})"));
        CHECK(rc.sea.gains.K_p == 1.0);
        CHECK(rc.sea.q.omega == doctest::Approx(model::hz_to_rad(25.0)));
        CHECK(rc.sim.dt == 1e-4);
        CHECK(has_prefix(rc.defaults_applied, "gains"));
        CHECK(has_prefix(rc.defaults_applied, "q_filter"));
        CHECK(has_prefix(rc.defaults_applied, "sim"));
        CHECK_FALSE(has_prefix(rc.defaults_applied, "plant.K"));
        CHECK(has_prefix(rc.defaults_applied, "plant.J_m"));
    }

    TEST_CASE("frequencies in hertz are converted") {
        const RunConfig rc = parse_config(json::parse(R"({"q_filter": {"omega_dob": "25 Hz"}})"));
        CHECK(rc.sea.q.omega == doctest::Approx(157.08).epsilon(1e-4));
        CHECK(parse_frequency(json("157 rad/s"), "x") == 157.0);
        CHECK(parse_frequency(json(10.0), "x") == 10.0);
        CHECK_THROWS_AS(parse_frequency(json("25 furlongs"), "x"), ConfigError);
    }

    TEST_CASE("unknown keys are rejected with a suggestion") {
        const json doc = json::parse(R"({"gains": {"Kp_torque": 2.0}})");
        CHECK(parse_error_path(doc) == "gains.Kp_torque");
        CHECK(parse_error_message(doc).find("K_p") != std::string::npos);
        const json misplaced = json::parse(R"({"Kp_torque": 2.0})");
        const std::string msg = parse_error_message(misplaced);
        CHECK(msg.find("K_p") != std::string::npos);
        CHECK(msg.find("gains") != std::string::npos);
        CHECK(suggest_key("omega_dbo", {"omega_dob", "zeta", "q0"}) == "omega_dob");
        CHECK(suggest_key("completely_unrelated", {"K_p", "K_d"}).empty());
    }

    TEST_CASE("invalid values carry their key path") {
        CHECK(parse_error_path(json::parse(R"({"plant": {"J_m": -1}})")) == "plant.J_m");
        CHECK(parse_error_path(json::parse(R"({"gains": {"K_d": "fast"}})")) == "gains.K_d");
        CHECK(parse_error_path(json::parse(R"({"schema_version": 7})")) == "schema_version");
        CHECK(parse_error_path(json::parse(R"({"architecture": "dob"})")) == "architecture");
        CHECK(parse_error_path(json::parse(R"({"environments": [{"K_e": -5}]})")).rfind("environments[0]", 0) == 0);
        CHECK_THROWS_AS(parse_config(json::parse(R"({"architecture": "nodob", "feedforward": "proposed"})")),
                        ConfigError);
    }

    TEST_CASE("malformed files are reported") {
        TempDir tmp;
        const auto p = tmp.path / "bad.json";
        std::ofstream(p) << "{ \"plant\": ";
        CHECK_THROWS_AS(load_config(p), ConfigError);
        CHECK_THROWS_AS(load_config(tmp.path / "missing.json"), ConfigError);
    }

    TEST_CASE("echo round-trips exactly") {
        const json doc = json::parse(R"({
            "plant": {"J_l": 3.5},
            "gains": {"K_p": 2.5, "K_d": 0.04},
            "impedance": {"K_imp": 1000, "B_imp": 0.1},
            "q_filter": {"omega_dob": "40 Hz", "zeta": 0.8},
            "architecture": "dobt",
            "feedforward": "proposed",
            "sim": {"dt": 5e-5, "derivative_filter_cutoff": "2000 Hz"},
            "environments": [{"K_e": 1e6, "B_e": 10, "contact": "unilateral", "gap": 1e-4}],
            "sweep": {"K_p": [1, 2], "architecture": ["dobm", "dobt"]}
        })");
        const RunConfig a = parse_config(doc);
        const json echo = a.echo();
        const RunConfig b = parse_config(echo);
        CHECK(b.echo() == echo);
        CHECK(b.echo().dump() == echo.dump());
        CHECK(b.defaults_applied.empty());
        CHECK(b.sea.q.omega == a.sea.q.omega);
        CHECK(b.sim.filter_cutoff() == a.sim.filter_cutoff());
        REQUIRE(b.environments.size() == 1);
        CHECK(b.environments[0].gap == 1e-4);
    }

    TEST_CASE("command names") {
        CHECK(parse_command("maxstiff") == Command::MaxStiff);
        CHECK(to_string(Command::Study) == "study");
        CHECK_THROWS_AS(parse_command("stiffest"), ConfigError);
    }

    TEST_CASE("spring-condition stiffness of the no-DOB loop") {
        RunConfig rc = parse_config(json::parse(R"({"condition": "spring", "feedforward": "zero"})"));
        const CommandResult r = evaluate_command(Command::MaxStiff, rc);
        CHECK(r.exit_code == kExitOk);
        CHECK(r.report["results"]["k_max_normalized"].get<double>() == doctest::Approx(1.0).epsilon(2e-3));
        CHECK(r.report["results"]["condition"] == "spring");
        CHECK(r.report["results"].contains("tol_k"));
        CHECK(r.report["results"].contains("margin_tol"));
    }

    TEST_CASE("unsafe baseline maps to the unsafe exit code") {
        RunConfig rc = parse_config(json::parse(R"({"condition": "spring", "architecture": "dobt"})"));
        const CommandResult r = evaluate_command(Command::MaxStiff, rc);
        CHECK(r.exit_code == kExitUnsafe);
        CHECK(r.report["results"]["k_max"].is_null());
    }

    TEST_CASE("analyze reports every condition with its tolerance") {
        RunConfig rc = parse_config(json::parse(R"({"feedforward": "zero"})"));
        const CommandResult r = evaluate_command(Command::Analyze, rc);
        CHECK(r.exit_code == kExitOk);
        for (const char* k : {"spring", "load_strict", "load_threshold"}) {
            CHECK(r.report["results"][k].contains("passive"));
            CHECK(r.report["results"][k].contains("tolerance"));
        }
        CHECK(r.report["results"]["requested_condition"] == "load-strict");
        rc.sea.arch = model::Architecture::Dobt;
        rc.condition = metrics::Condition::Spring;
        CHECK(evaluate_command(Command::Analyze, rc).exit_code == kExitUnsafe);
    }

    TEST_CASE("simulating far above the limit is flagged") {
        RunConfig rc = parse_config(json::parse(R"({
            "feedforward": "zero",
            "impedance": {"K_imp": 9000000, "B_imp": 0},
            "sim": {"duration": 1.0},
            "environments": [{"K_e": 10000}]
        })"));
        const CommandResult r = evaluate_command(Command::Simulate, rc);
        CHECK(r.exit_code == kExitUnsafe);
        CHECK(r.report["results"]["all_stable"] == false);
        CHECK(r.report["results"]["prediction"]["passive"] == false);
    }

    TEST_CASE("configuration errors map to exit code 2") {
        RunConfig rc = parse_config(json::parse(R"({"zregion": {"omega_limit": 10}})"));
        const CommandResult r = evaluate_command(Command::ZRegion, rc);
        CHECK(r.exit_code == kExitConfig);
        CHECK(r.report.contains("error"));
    }

    TEST_CASE("study tallies cover every run") {
        RunConfig rc = parse_config(json::parse(R"({
            "impedance": {"K_imp": 1000, "B_imp": 0.1},
            "sim": {"duration": 0.5},
            "sweep": {"K_p": [1, 5], "architecture": ["nodob", "dobm"]}
        })"));
        const CommandResult r = evaluate_command(Command::Study, rc);
        const json& res = r.report["results"];
        CHECK(res["runs"] == 8);
        for (const char* c : {"spring", "load-strict", "load-threshold"}) {
            const json& t = res["totals"][c];
            CHECK(t["fp"].get<int>() + t["fn"].get<int>() + t["tp"].get<int>() + t["tn"].get<int>() +
                      res["errors"].get<int>() ==
                  8);
        }
    }

    TEST_CASE("reports and sidecars are written to the output directory") {
        TempDir tmp;
        RunConfig rc = parse_config(json::parse(R"({"feedforward": "zero", "sim": {"duration": 0.05}})"));
        const CommandResult r = run_command(Command::Simulate, rc, tmp.path);
        CHECK(std::filesystem::exists(tmp.path / "report.json"));
        CHECK(std::filesystem::exists(tmp.path / "trajectory_0.csv"));
        CHECK(std::filesystem::exists(tmp.path / "trajectory_1.csv"));
        std::ifstream is(tmp.path / "report.json");
        const json rep = json::parse(is);
        CHECK(rep["exit_code"] == r.exit_code);
        CHECK(rep["sidecars"].size() == 2);
        CHECK(rep["inputs"] == rc.echo());

        run_command(Command::ZRegion, rc, tmp.path);
        CHECK(std::filesystem::exists(tmp.path / "zregion_integrand.csv"));
        run_command(Command::Analyze, rc, tmp.path);
        CHECK(std::filesystem::exists(tmp.path / "frequency_response.csv"));
    }

    TEST_CASE("overrides replace configured values and leave the defaults list") {
        RunConfig rc = parse_config(json::object());
        CHECK(has_prefix(rc.defaults_applied, "architecture"));
        apply_overrides(rc, {model::Architecture::Dobm, metrics::Condition::Spring, model::FeedforwardKind::Zero});
        CHECK(rc.sea.arch == model::Architecture::Dobm);
        CHECK(rc.condition == metrics::Condition::Spring);
        CHECK(rc.sea.ff == model::FeedforwardKind::Zero);
        CHECK(rc.sweep.base.arch == model::Architecture::Dobm);
        CHECK_FALSE(has_prefix(rc.defaults_applied, "architecture"));
        CHECK_FALSE(has_prefix(rc.defaults_applied, "condition"));
        RunConfig bad = parse_config(json::object());
        CHECK_THROWS_AS(apply_overrides(bad, {std::nullopt, std::nullopt, model::FeedforwardKind::Proposed}),
                        ConfigError);
    }
}
