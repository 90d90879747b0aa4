#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gyrostat/hamilton_jacobi.hpp"
#include "gyrostat/sampling.hpp"
#include "gyrostat/scenario.hpp"

namespace gyrostat {

/// Configuration of the residual suite.
struct HjSuiteConfig {
  long n{1000};
  std::uint64_t seed{12345};
  std::vector<std::string> batteries{};
  std::string report_name{"hj_report.json"};
  double tol_type1{1e-15};
  double tol_type2_gate{1e-4};
  double tol_closedness_constant{1e-9};
  double tol_closedness_closed{1e-6};
  double tol_closedness_open{1e-3};
  double tol_poisson_identity{1e-9};
  double tol_poisson_flow{1e-5};
  double tol_poisson_broken{1e-2};
};

inline HjSuiteConfig parse_hj_suite(const nlohmann::json& j) {
  HjSuiteConfig c;
  if (j.contains("N")) {
    const double n = cfg::number_at(j, "N", "");
    if (!(n >= 1.0)) throw ConfigError("N", "must be >= 1");
    c.n = static_cast<long>(n);
  }
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(cfg::number_at(j, "seed", ""));
  const auto& bj = cfg::child(j, "batteries", "");
  if (!bj.is_array()) throw ConfigError("batteries", "expected an array of battery names");
  for (const auto& e : bj) {
    if (!e.is_string()) throw ConfigError("batteries", "expected strings");
    c.batteries.push_back(e.get<std::string>());
  }
  if (c.batteries.empty()) throw ConfigError("batteries", "must not be empty");
  for (const auto& b : c.batteries) {
    if (b != "type1_c" && b != "type1_n" && b != "closedness" && b != "type2_c" &&
        b != "type2_n" && b != "poisson")
      throw ConfigError("batteries", "unknown battery '" + b + "'");
  }
  if (j.contains("report")) c.report_name = cfg::string_at(j, "report", "");
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    c.tol_type1 = cfg::number_or(t, "type1", c.tol_type1);
    c.tol_type2_gate = cfg::number_or(t, "type2_gate", c.tol_type2_gate);
    c.tol_closedness_constant = cfg::number_or(t, "closedness_constant", c.tol_closedness_constant);
    c.tol_closedness_closed = cfg::number_or(t, "closedness_closed", c.tol_closedness_closed);
    c.tol_closedness_open = cfg::number_or(t, "closedness_open", c.tol_closedness_open);
    c.tol_poisson_identity = cfg::number_or(t, "poisson_identity", c.tol_poisson_identity);
    c.tol_poisson_flow = cfg::number_or(t, "poisson_flow", c.tol_poisson_flow);
    c.tol_poisson_broken = cfg::number_or(t, "poisson_broken", c.tol_poisson_broken);
  }
  return c;
}

namespace detail {

struct SuiteEntry {
  std::string battery;
  std::string name;
  double value{0.0};
  double gate{0.0};
  bool upper_bound{true};  // pass when value <= gate (else value >= gate)
  bool pass() const { return upper_bound ? value <= gate : value >= gate; }
};

inline nlohmann::json to_json(const SuiteEntry& e) {
  return {{"battery", e.battery}, {"name", e.name}, {"value", e.value},
          {"gate", e.gate},       {"relation", e.upper_bound ? "<=" : ">="},
          {"pass", e.pass()}};
}

}  // namespace detail

struct HjSuiteOutcome {
  bool all_pass{true};
  std::filesystem::path report_path;
};

/// Runs the configured residual batteries with seeded, reproducible sampling
/// and writes a report with one entry per gate.
inline HjSuiteOutcome run_hj_suite(const std::string& config_path, const CliOptions& opt = {}) {
  HjSuiteConfig c = parse_hj_suite(cfg::load_file(config_path));
  if (opt.seed) c.seed = *opt.seed;

  SampleRng rng(c.seed);
  std::vector<detail::SuiteEntry> entries;

  for (const std::string& b : c.batteries) {
    if (b == "type1_c") {
      double worst = 0.0;
      for (long i = 0; i < c.n; ++i) {
        const InertiaParams p = rng.params(0.5, 5.0, false);
        PointC g{};
        for (auto& v : g) v = rng.uniform(-2.0, 2.0);
        worst = std::fmax(worst, type1_residual_c(g, p));
      }
      entries.push_back({b, "max_residual", worst, c.tol_type1, true});
    } else if (b == "type1_n") {
      double worst = 0.0;
      for (long i = 0; i < c.n; ++i) {
        const InertiaParams p = rng.params(0.5, 5.0, true);
        PointN g{};
        for (auto& v : g) v = rng.uniform(-2.0, 2.0);
        worst = std::fmax(worst, type1_residual_n(g, p));
      }
      entries.push_back({b, "max_residual", worst, c.tol_type1, true});
    } else if (b == "closedness") {
      auto chart_point = [&rng]() {
        std::array<double, 4> q{};
        const Vec3 th = rng.uniform(0.0, 1.0) * rng.unit_vec3();
        q[0] = th.x;
        q[1] = th.y;
        q[2] = th.z;
        q[3] = rng.uniform(-2.0, 2.0);
        return q;
      };
      const std::array<double, 4> cvals{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                        rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const OneForm<4> constant = [cvals](const std::array<double, 4>&) { return cvals; };
      const OneForm<4> non_closed = [](const std::array<double, 4>& q) {
        return std::array<double, 4>{q[1], 0.0, 0.0, 0.0};
      };
      // Generating-function witness routed through a full reduced section.
      const ReducedOneFormC section = [](const ChartPoint& q) {
        const auto w = [](const std::array<double, 4>& y) {
          return std::sin(y[0]) * std::cos(y[1]) + y[2] * y[2] * y[3] + 0.3 * y[0] * y[3];
        };
        const auto dw = differential_of<4>(w);
        const auto g = dw({q.theta.x, q.theta.y, q.theta.z, q.alpha});
        return PointC{g[0], g[1], g[2], q.alpha, g[3]};
      };
      double worst_const = 0.0, worst_dw = 0.0, best_open = 1e300;
      for (int i = 0; i < 5; ++i) {
        const auto q = chart_point();
        worst_const = std::fmax(worst_const, closedness_residual<4>(constant, q));
        worst_dw = std::fmax(worst_dw, closedness_residual<4>(chart_covector(section), q));
        best_open = std::fmin(best_open, closedness_residual<4>(non_closed, q));
      }
      entries.push_back({b, "constant_form", worst_const, c.tol_closedness_constant, true});
      entries.push_back({b, "generating_function", worst_dw, c.tol_closedness_closed, true});
      entries.push_back({b, "non_closed_witness", best_open, c.tol_closedness_open, false});
    } else if (b == "type2_c" || b == "type2_n") {
      const bool coincident = b == "type2_c";
      const InertiaParams p = rng.params(0.5, 5.0, !coincident);
      long discordant = 0;
      double worst_solution = 0.0;
      auto classify = [&](const std::pair<double, double>& r, bool expect_solution) {
        const bool lhs_ok = r.first < c.tol_type2_gate;
        const bool rhs_ok = r.second < c.tol_type2_gate;
        if (lhs_ok != rhs_ok) ++discordant;
        if (expect_solution) worst_solution = std::fmax(worst_solution, std::fmax(r.first, r.second));
      };
      if (coincident) {
        const auto battery = type2_battery_c(p);
        for (int i = 0; i < 5; ++i) {
          const ReducedStateC s = rng.state_c();
          for (const auto& entry : battery)
            classify(type2_residual_c(entry.eps, entry.lam, s, p), entry.expect_solution);
        }
      } else {
        const auto battery = type2_battery_n(p);
        for (int i = 0; i < 5; ++i) {
          const ReducedStateN s = rng.state_n();
          for (const auto& entry : battery)
            classify(type2_residual_n(entry.eps, entry.lam, s, p), entry.expect_solution);
        }
      }
      entries.push_back({b, "discordant_cases", static_cast<double>(discordant), 0.0, true});
      entries.push_back({b, "max_solution_residual", worst_solution, c.tol_type2_gate, true});
    } else if (b == "poisson") {
      const InertiaParams p = rng.params(0.5, 5.0, false);
      auto state_away_from_origin = [&rng]() {
        for (;;) {
          const ReducedStateC s = rng.state_c();
          if (norm(s.Pi) >= 0.5) return s;
        }
      };
      double worst_id = 0.0, worst_flow = 0.0, best_broken = 1e300;
      const auto flow = reduced_flow_map_c(p, 0.1);
      const ReducedPointMapC doubling = [](const PointC& x) {
        return PointC{2 * x[0], 2 * x[1], 2 * x[2], x[3], x[4]};
      };
      for (int i = 0; i < 5; ++i) {
        const ReducedStateC s = state_away_from_origin();
        worst_id = std::fmax(worst_id, poisson_map_residual_c(identity_map<5>(), s));
        worst_flow = std::fmax(worst_flow, poisson_map_residual_c(flow, s));
        best_broken = std::fmin(best_broken, poisson_map_residual_c(doubling, s));
      }
      entries.push_back({b, "identity", worst_id, c.tol_poisson_identity, true});
      entries.push_back({b, "flow_t0.1", worst_flow, c.tol_poisson_flow, true});
      entries.push_back({b, "broken_doubling", best_broken, c.tol_poisson_broken, false});
    }
  }

  namespace fs = std::filesystem;
  const fs::path outdir = detail::resolve_output_dir(opt);
  fs::create_directories(outdir);
  const fs::path report_path = outdir / c.report_name;

  nlohmann::json report;
  report["config"] = config_path;
  report["seed"] = c.seed;
  report["N"] = c.n;
  report["entries"] = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& e : entries) {
    report["entries"].push_back(detail::to_json(e));
    all_pass = all_pass && e.pass();
    if (!opt.quiet)
      std::cout << e.battery << " / " << e.name << ": " << (e.pass() ? "PASS" : "FAIL")
                << " (value=" << e.value << (e.upper_bound ? " <= " : " >= ") << e.gate << ")\n";
  }
  report["pass"] = all_pass;
  std::ofstream rep(report_path);
  if (!rep) throw ConfigError("report", "cannot open " + report_path.string());
  rep << report.dump(2) << "\n";
  return {all_pass, report_path};
}

/// Exit-code wrapper: 0 all gates pass, 1 gate failure, 2 config error.
inline int run_hj_suite_exit(const std::string& config_path, const CliOptions& opt = {}) {
  try {
    return run_hj_suite(config_path, opt).all_pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NonFiniteError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace gyrostat
