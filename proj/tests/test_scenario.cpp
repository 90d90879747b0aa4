#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gyrostat/hj_suite.hpp"
#include "gyrostat/scenario.hpp"

using namespace gyrostat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("gyrostat_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << j.dump(2);
  return p;
}

json reference_config() {
  return json{{"case", "coincident"},
              {"params", {{"Ibar", {3.0, 2.0, 1.0}}, {"J3", 1.0}}},
              {"initial", {{"Pi", {1.0, 1.0, 1.0}}, {"alpha", 0.0}, {"l", 1.0}}},
              {"control", {{"type", "none"}}},
              {"dt", 1e-3},
              {"steps", 10000},
              {"integrator", "rk4"}};
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run_scenario: reference run passes and pins H(0)") {
  const fs::path dir = fresh_dir("ref");
  const fs::path cfg = write_config(dir, reference_config());
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;

  CHECK(run_scenario_exit(cfg.string(), opt) == 0);

  const auto lines = read_lines(dir / "trajectory.csv");
  REQUIRE(lines.size() == 10002);  // header + steps + 1
  CHECK(lines[0] == "t,Pi1,Pi2,Pi3,alpha,l,H,casimir_pi2");

  // H is the 7th column of the first data row; 11/12 to 12 digits.
  std::stringstream row(lines[1]);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(row, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 8);
  const double h0 = std::stod(cells[6]);
  CHECK(std::fabs(h0 - 11.0 / 12.0) < 0.5e-12);

  // Report exists and is green.
  const json rep = json::parse(read_file(dir / "report.json"));
  CHECK(rep.at("pass").get<bool>());
  for (const auto& c : rep.at("checks")) CHECK(c.at("pass").get<bool>());
}

TEST_CASE("run_scenario: equilibrium gives zero drifts") {
  const fs::path dir = fresh_dir("eq");
  json cfg = reference_config();
  cfg["initial"]["Pi"] = {0.0, 0.0, 0.0};
  cfg["initial"]["l"] = 0.0;
  cfg["steps"] = 100;
  const fs::path p = write_config(dir, cfg);
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;
  CHECK(run_scenario_exit(p.string(), opt) == 0);
  const json rep = json::parse(read_file(dir / "report.json"));
  for (const auto& c : rep.at("checks")) CHECK(c.at("max_rel_drift").get<double>() == 0.0);
}

TEST_CASE("run_scenario: config validation") {
  const fs::path dir = fresh_dir("bad");
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;

  json bad = reference_config();
  bad["dt"] = -1.0;
  CHECK(run_scenario_exit(write_config(dir, bad, "dt.json").string(), opt) == 2);
  try {
    run_scenario(write_config(dir, bad, "dt2.json").string(), opt);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "dt");
  }

  bad = reference_config();
  bad["initial"].erase("Pi");
  CHECK(run_scenario_exit(write_config(dir, bad, "nopi.json").string(), opt) == 2);

  bad = reference_config();
  bad["initial"]["Gamma"] = {0, 0, 1};  // not a coincident-case coordinate
  CHECK(run_scenario_exit(write_config(dir, bad, "gamma.json").string(), opt) == 2);

  bad = reference_config();
  bad["integrator"] = "rkmk4";  // needs a full state
  CHECK(run_scenario_exit(write_config(dir, bad, "rkmk.json").string(), opt) == 2);

  CHECK(run_scenario_exit((dir / "missing.json").string(), opt) == 2);
}

TEST_CASE("run_scenario: stride and row count") {
  const fs::path dir = fresh_dir("stride");
  json cfg = reference_config();
  cfg["steps"] = 1000;
  const fs::path p = write_config(dir, cfg);
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.stride = 10;
  opt.quiet = true;
  CHECK(run_scenario_exit(p.string(), opt) == 0);
  const auto lines = read_lines(dir / "trajectory.csv");
  REQUIRE(lines.size() == 102);  // header + 1000/10 + 1

  // Uniform strictly-increasing time column.
  double prev = -1.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double t = std::stod(lines[i].substr(0, lines[i].find(',')));
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("run_scenario: reruns are byte-identical") {
  const fs::path d1 = fresh_dir("det1");
  const fs::path d2 = fresh_dir("det2");
  json cfg = reference_config();
  cfg["steps"] = 500;
  const fs::path p1 = write_config(d1, cfg);
  const fs::path p2 = write_config(d2, cfg);
  CliOptions o1, o2;
  o1.output_dir = d1.string();
  o1.quiet = true;
  o2.output_dir = d2.string();
  o2.quiet = true;
  REQUIRE(run_scenario_exit(p1.string(), o1) == 0);
  REQUIRE(run_scenario_exit(p2.string(), o2) == 0);
  CHECK(read_file(d1 / "trajectory.csv") == read_file(d2 / "trajectory.csv"));
}

TEST_CASE("run_scenario: non-coincident full state with rkmk4") {
  const fs::path dir = fresh_dir("ncfull");
  const json cfg{{"case", "noncoincident"},
                 {"params", {{"Ibar", {3.0, 2.0, 1.0}}, {"J3", 1.0}, {"gh", 1.0}, {"chi", {0, 0, 1}}}},
                 {"initial",
                  {{"Pi", {1.0, 1.0, 1.0}},
                   {"Gamma", {0.0, 0.0, 1.0}},
                   {"alpha", 0.0},
                   {"l", 1.0},
                   {"attitude", "identity"}}},
                 {"control", {{"type", "none"}}},
                 {"dt", 1e-3},
                 {"steps", 2000},
                 {"integrator", "rkmk4"}};
  const fs::path p = write_config(dir, cfg);
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;
  CHECK(run_scenario_exit(p.string(), opt) == 0);
  const auto lines = read_lines(dir / "trajectory.csv");
  CHECK(lines[0] ==
        "t,Pi1,Pi2,Pi3,Gamma1,Gamma2,Gamma3,alpha,l,H,casimir_pigamma,casimir_gamma2,mu1,mu2,mu3");
}

TEST_CASE("run_scenario: constant torque ramps the rotor momentum") {
  const fs::path dir = fresh_dir("ctrl");
  json cfg = reference_config();
  cfg["control"] = {{"type", "constant"}, {"value", 0.3}};
  cfg["steps"] = 1000;
  const fs::path p = write_config(dir, cfg);
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;
  CHECK(run_scenario_exit(p.string(), opt) == 0);  // energy/l checks are skipped under control
  const auto lines = read_lines(dir / "trajectory.csv");
  std::stringstream row(lines.back());
  std::vector<std::string> cells;
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(cell);
  const double l_final = std::stod(cells[5]);
  CHECK(std::fabs(l_final - (1.0 + 0.3 * 1.0)) <= 1e-10);
}

TEST_CASE("run_hj_suite: default batteries pass") {
  const fs::path dir = fresh_dir("hj");
  const json cfg{{"N", 200},
                 {"seed", 4242},
                 {"batteries", {"type1_c", "type1_n", "closedness", "type2_c", "type2_n", "poisson"}}};
  const fs::path p = write_config(dir, cfg);
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;
  CHECK(run_hj_suite_exit(p.string(), opt) == 0);
  const json rep = json::parse(read_file(dir / "hj_report.json"));
  CHECK(rep.at("pass").get<bool>());
  CHECK(rep.at("entries").size() >= 8);
}

TEST_CASE("run_hj_suite: empty battery list is a config error") {
  const fs::path dir = fresh_dir("hjempty");
  const json cfg{{"N", 10}, {"batteries", json::array()}};
  const fs::path p = write_config(dir, cfg);
  CliOptions opt;
  opt.output_dir = dir.string();
  opt.quiet = true;
  CHECK(run_hj_suite_exit(p.string(), opt) == 2);
}

TEST_CASE("cli binary: exit codes", "[cli]") {
  const char* cli = std::getenv("GYROSTAT_CLI");
  if (!cli) SKIP("GYROSTAT_CLI not set");
  const fs::path dir = fresh_dir("clibin");
  const fs::path good = write_config(dir, [] {
    json c = reference_config();
    c["steps"] = 50;
    return c;
  }(), "good.json");
  json bad = reference_config();
  bad["dt"] = -1.0;
  const fs::path badp = write_config(dir, bad, "bad.json");

  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(run("simulate " + good.string() + " --quiet --output-dir " + dir.string()) == 0);
  CHECK(run("simulate " + badp.string() + " --quiet --output-dir " + dir.string()) == 2);
  CHECK(run("hj-suite " + badp.string() + " --quiet --output-dir " + dir.string()) == 2);
}
