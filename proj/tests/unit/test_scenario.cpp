#include "vexp/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

using namespace vexp;
using nlohmann::json;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

ScenarioConfig small_config(const std::string& potential, const std::string& mode)
{
    return parse_config(R"j({"grid": {"nodes": 33}, "potential": )j" + potential + R"j(, "mode": ")j" + mode + R"j("})j");
}

} // namespace

TEST_CASE("defaults and full parse")
{
    const ScenarioConfig d = parse_config("{}");
    CHECK(d.grid.dimension == 1);
    CHECK(d.grid.nodes.front() == 129);
    CHECK(d.mode == Mode::automatic);
    CHECK(d.potential.preset == "j2");

    const ScenarioConfig c = parse_config(R"j({
      "grid": {"dimension": 2, "bounds": [[0, 1], [0, 2]], "nodes": [17, 33]},
      "exponent": "linear(2,1)",
      "lambda": 1.5,
      "function": "hat(2)",
      "potential": {"preset": "j1", "mu": 2, "sigma": 50, "q_plus": 5},
      "mode": "hj1",
      "solver": {"path_nodes": 9, "seed": 42, "rho_grid": [0.1, 0.2]},
      "audit": {"nu": 4.5, "M": 3, "dimension": 3},
      "far_point": {"u_bar": "plateau(1.5, 0.1)", "t_max": 64},
      "output": {"dir": "out/x"}
    })j");
    CHECK(c.grid.dimension == 2);
    CHECK(c.grid.bounds[1].second == 2.0);
    CHECK(c.grid.nodes[1] == 33);
    CHECK(c.lambda == 1.5);
    CHECK(c.potential.sigma == 50.0);
    CHECK(c.mode == Mode::hj1);
    CHECK(c.solver.path_nodes == 9);
    CHECK(c.solver.seed == 42);
    CHECK(c.solver.rho_grid.size() == 2);
    CHECK(c.audit.nu == 4.5);
    CHECK(c.audit.dimension == 3);
    CHECK(c.far_point.u_bar == "plateau(1.5, 0.1)");
    CHECK(c.output_dir == "out/x");
}

TEST_CASE("schema errors name the field")
{
    CHECK(error_of(R"j({"solver": {"path_nodez": 3}})j").find("solver.path_nodez") != std::string::npos);
    CHECK(error_of(R"j({"bogus": 1})j").find("bogus") != std::string::npos);
    CHECK(error_of(R"j({"lambda": "one"})j").find("lambda") != std::string::npos);
    CHECK(error_of(R"j({"solver": {"path_nodes": 2}})j").find("solver.path_nodes") != std::string::npos);
    CHECK(error_of(R"j({"mode": "hj3"})j").find("mode") != std::string::npos);
    CHECK(error_of(R"j({"grid": 4})j").find("grid") != std::string::npos);
    CHECK(error_of("{\n  \"lambda\": 1,\n  oops\n}").find("line 3") != std::string::npos);
}

TEST_CASE("commands")
{
    CHECK(parse_command("lambda-star") == Command::lambda_star);
    CHECK(std::string(to_string(Command::solve)) == "solve");
    CHECK_THROWS_AS(parse_command("lambda_star"), ConfigError);
}

TEST_CASE("norms command")
{
    ScenarioConfig c = parse_config(R"j({"grid": {"nodes": 5}, "function": "hat(1)"})j");
    const ScenarioOutcome o = run_scenario(c, Command::norms);
    CHECK(o.exit_code == 0);
    CHECK(o.csv.empty());
    const json j = json::parse(o.summary);
    CHECK(j["modular"].get<double>() == doctest::Approx(0.375));
    CHECK(j["phi"].get<double>() == doctest::Approx(4.375));
    CHECK(j["schema_version"] == schema_version);
    CHECK(j.contains("luxemburg"));
    CHECK(j.contains("sobolev"));
}

TEST_CASE("lambda-star command")
{
    const ScenarioOutcome o = run_scenario(parse_config(R"j({"grid": {"nodes": 33}})j"), Command::lambda_star);
    CHECK(o.exit_code == 0);
    const json j = json::parse(o.summary);
    CHECK(j["lambda_star"].get<double>() == doctest::Approx(9.8616).epsilon(1e-3));
    CHECK(j["per_start"].size() == 5);
}

TEST_CASE("audit command resolves the hypothesis family")
{
    SUBCASE("j2 selects the superlinear pipeline")
    {
        const ScenarioOutcome o = run_scenario(small_config(R"j({"preset": "j2"})j", "auto"), Command::audit);
        CHECK(o.exit_code == 0);
        const json j = json::parse(o.summary);
        CHECK(j["families"]["Hj"] == true);
        CHECK(j["families"]["Hj1"] == false);
        CHECK(j["families"]["Hj2"] == true);
        CHECK(j["resolved_mode"] == "hj2");
    }
    SUBCASE("j2 cannot run the far-point pipeline")
    {
        const ScenarioOutcome o = run_scenario(small_config(R"j({"preset": "j2"})j", "hj1"), Command::audit);
        CHECK(o.exit_code == 2);
    }
    SUBCASE("zero potential passes nothing")
    {
        const ScenarioOutcome o = run_scenario(small_config(R"j({"preset": "zero"})j", "auto"), Command::audit);
        CHECK(o.exit_code == 2);
        CHECK(json::parse(o.summary).contains("error"));
    }
}

TEST_CASE("solve command on a coarse grid")
{
    ScenarioConfig c = small_config(R"j({"preset": "quartic", "mu": 1})j", "hj2");
    const ScenarioOutcome a = run_scenario(c, Command::solve);
    CHECK(a.exit_code == 0);
    const json j = json::parse(a.summary);
    CHECK(j["converged"] == true);
    CHECK(j["certification"]["pass"] == true);
    CHECK(j["R_candidate"].get<double>() > j["eta"].get<double>());
    CHECK(a.csv.rfind("x,u\n", 0) == 0);
    CHECK(std::count(a.csv.begin(), a.csv.end(), '\n') == 34);

    const ScenarioOutcome b = run_scenario(c, Command::solve);
    CHECK(a.summary == b.summary);
    CHECK(a.csv == b.csv);

    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "vexp_scenario_test";
    std::filesystem::remove_all(dir);
    write_outputs(a, Command::solve, dir.string());
    std::ifstream f(dir / "solve.json");
    std::stringstream text;
    text << f.rdbuf();
    CHECK(text.str() == a.summary);
    CHECK(std::filesystem::exists(dir / "solution.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("solve reports a missing geometry")
{
    const ScenarioConfig c = small_config(R"j({"preset": "power", "coef": 20, "nu": 2})j", "hj2");
    const ScenarioOutcome o = run_scenario(c, Command::solve);
    CHECK(o.exit_code != 0);
    CHECK(json::parse(o.summary).contains("error"));
}
