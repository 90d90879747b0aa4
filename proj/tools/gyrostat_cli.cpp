// Command-line front end: config-driven simulation runs and the
// Hamilton-Jacobi residual suite.

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "gyrostat/hj_suite.hpp"
#include "gyrostat/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gyrostat: reduced dynamics of a rigid spacecraft with an internal rotor"};
  app.require_subcommand(1);

  std::string config;
  gyrostat::CliOptions opt;
  std::string output_dir;
  int stride = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "scenario/suite configuration file (JSON)")->required();
    sub->add_option("--output-dir", output_dir, "directory for output files");
    sub->add_option("--stride", stride, "retain every k-th sample")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized batteries");
    sub->add_flag("--quiet", opt.quiet, "suppress per-check output");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate a scenario and audit conservation");
  add_common(simulate);
  CLI::App* hj = app.add_subcommand("hj-suite", "run the Hamilton-Jacobi residual batteries");
  add_common(hj);

  CLI11_PARSE(app, argc, argv);

  if (!output_dir.empty()) opt.output_dir = output_dir;
  if (stride > 0) opt.stride = stride;
  if (app.count_all() && (simulate->count("--seed") || hj->count("--seed"))) opt.seed = seed;

  if (simulate->parsed()) return gyrostat::run_scenario_exit(config, opt);
  return gyrostat::run_hj_suite_exit(config, opt);
}
