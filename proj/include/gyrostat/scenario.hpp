#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gyrostat/dynamics.hpp"
#include "gyrostat/errors.hpp"
#include "gyrostat/hamilton_jacobi.hpp"
#include "gyrostat/model.hpp"
#include "gyrostat/reduction.hpp"
#include "gyrostat/sampling.hpp"
#include "gyrostat/so3.hpp"

namespace gyrostat {

enum class CaseKind { coincident, noncoincident };
enum class IntegratorKind { rk4, rkmk4 };

struct ControlSpec {
  enum class Kind { none, constant, linear_feedback } kind{Kind::none};
  double value{0.0};  // torque for constant, gain for linear_feedback
};

/// One fully validated simulation request.
struct Scenario {
  CaseKind kind{CaseKind::coincident};
  InertiaParams params{};
  ReducedStateN initial{};           // Gamma ignored in the coincident case
  std::optional<Mat3> attitude{};    // present = full-state run
  ControlSpec control{};
  double dt{1e-3};
  long steps{1000};
  IntegratorKind integrator{IntegratorKind::rk4};
  int stride{1};
  std::string trajectory_name{"trajectory.csv"};
  std::string report_name{"report.json"};
  // Conservation gates; overridable from the config.
  double tol_energy{1e-9};
  double tol_casimir{1e-10};
  double tol_rotor_momentum{1e-13};
  double tol_spatial_momentum{1e-9};
  double tol_advected{1e-8};
};

/// Command-line overrides. The output directory resolution order is
/// --output-dir flag, then the GYROSTAT_OUTPUT_DIR environment variable,
/// then the current directory.
struct CliOptions {
  std::optional<std::string> output_dir{};
  std::optional<int> stride{};
  std::optional<std::uint64_t> seed{};
  bool quiet{false};
};

namespace cfg {

using nlohmann::json;

inline const json& child(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path + key, "missing field");
  return j.at(key);
}

inline double number_at(const json& j, const char* key, const std::string& path) {
  const json& v = child(j, key, path);
  if (!v.is_number()) throw ConfigError(path + key, "expected a number");
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(key, "expected a number");
  return j.at(key).get<double>();
}

inline std::string string_at(const json& j, const char* key, const std::string& path) {
  const json& v = child(j, key, path);
  if (!v.is_string()) throw ConfigError(path + key, "expected a string");
  return v.get<std::string>();
}

inline Vec3 vec3_at(const json& j, const char* key, const std::string& path) {
  const json& v = child(j, key, path);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number())
    throw ConfigError(path + key, "expected an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline json load_file(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError(config_path, "cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(config_path, std::string("parse error: ") + e.what());
  }
  return j;
}

}  // namespace cfg

inline Scenario parse_scenario(const nlohmann::json& j) {
  using cfg::child;
  Scenario sc;

  const std::string kind = cfg::string_at(j, "case", "");
  if (kind == "coincident")
    sc.kind = CaseKind::coincident;
  else if (kind == "noncoincident")
    sc.kind = CaseKind::noncoincident;
  else
    throw ConfigError("case", "expected 'coincident' or 'noncoincident'");

  const auto& pj = child(j, "params", "");
  const Vec3 ibar = cfg::vec3_at(pj, "Ibar", "params.");
  sc.params.Ibar1 = ibar.x;
  sc.params.Ibar2 = ibar.y;
  sc.params.Ibar3 = ibar.z;
  sc.params.J3 = cfg::number_at(pj, "J3", "params.");
  if (sc.kind == CaseKind::noncoincident) {
    sc.params.gh = cfg::number_at(pj, "gh", "params.");
    sc.params.chi = pj.contains("chi") ? cfg::vec3_at(pj, "chi", "params.") : Vec3{0.0, 0.0, 1.0};
  } else {
    sc.params.gh = cfg::number_or(pj, "gh", 0.0);
    if (sc.params.gh != 0.0)
      throw ConfigError("params.gh", "must be 0 in the coincident case");
  }
  try {
    sc.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("params", e.what());
  }

  const auto& ij = child(j, "initial", "");
  sc.initial.Pi = cfg::vec3_at(ij, "Pi", "initial.");
  sc.initial.alpha = cfg::number_at(ij, "alpha", "initial.");
  sc.initial.l = cfg::number_at(ij, "l", "initial.");
  if (sc.kind == CaseKind::noncoincident) {
    sc.initial.Gamma = cfg::vec3_at(ij, "Gamma", "initial.");
  } else if (ij.contains("Gamma")) {
    throw ConfigError("initial.Gamma", "not a coincident-case coordinate");
  }
  if (ij.contains("attitude")) {
    const auto& aj = ij.at("attitude");
    Mat3 m;
    if (aj.is_string() && aj.get<std::string>() == "identity") {
      m = Mat3::identity();
    } else if (aj.is_array() && aj.size() == 9) {
      for (int k = 0; k < 9; ++k) {
        if (!aj[k].is_number()) throw ConfigError("initial.attitude", "expected 9 numbers");
        m.a[static_cast<std::size_t>(k)] = aj[k].get<double>();
      }
      if (!is_rotation(m, 1e-9)) throw ConfigError("initial.attitude", "not a rotation matrix");
    } else {
      throw ConfigError("initial.attitude", "expected 'identity' or an array of 9 numbers");
    }
    sc.attitude = m;
  }

  if (j.contains("control")) {
    const auto& cj = j.at("control");
    const std::string ck = cfg::string_at(cj, "type", "control.");
    if (ck == "none") {
      sc.control.kind = ControlSpec::Kind::none;
    } else if (ck == "constant") {
      sc.control.kind = ControlSpec::Kind::constant;
      sc.control.value = cfg::number_at(cj, "value", "control.");
    } else if (ck == "linear_feedback") {
      sc.control.kind = ControlSpec::Kind::linear_feedback;
      sc.control.value = cfg::number_at(cj, "gain", "control.");
    } else {
      throw ConfigError("control.type", "expected 'none', 'constant' or 'linear_feedback'");
    }
  }

  sc.dt = cfg::number_at(j, "dt", "");
  if (!(sc.dt > 0.0)) throw ConfigError("dt", "must be positive");
  const double steps = cfg::number_at(j, "steps", "");
  if (!(steps >= 1.0) || steps != std::floor(steps))
    throw ConfigError("steps", "must be an integer >= 1");
  sc.steps = static_cast<long>(steps);

  const std::string integ = cfg::string_at(j, "integrator", "");
  if (integ == "rk4")
    sc.integrator = IntegratorKind::rk4;
  else if (integ == "rkmk4")
    sc.integrator = IntegratorKind::rkmk4;
  else
    throw ConfigError("integrator", "expected 'rk4' or 'rkmk4'");
  if (sc.integrator == IntegratorKind::rkmk4 && !sc.attitude)
    throw ConfigError("integrator", "rkmk4 requires initial.attitude (full-state run)");

  if (j.contains("stride")) {
    const double st = cfg::number_at(j, "stride", "");
    if (!(st >= 1.0) || st != std::floor(st)) throw ConfigError("stride", "must be an integer >= 1");
    sc.stride = static_cast<int>(st);
  }

  if (j.contains("outputs")) {
    const auto& oj = j.at("outputs");
    if (oj.contains("trajectory")) sc.trajectory_name = cfg::string_at(oj, "trajectory", "outputs.");
    if (oj.contains("report")) sc.report_name = cfg::string_at(oj, "report", "outputs.");
  }

  if (j.contains("tolerances")) {
    const auto& tj = j.at("tolerances");
    sc.tol_energy = cfg::number_or(tj, "energy", sc.tol_energy);
    sc.tol_casimir = cfg::number_or(tj, "casimir", sc.tol_casimir);
    sc.tol_rotor_momentum = cfg::number_or(tj, "rotor_momentum", sc.tol_rotor_momentum);
    sc.tol_spatial_momentum = cfg::number_or(tj, "spatial_momentum", sc.tol_spatial_momentum);
    sc.tol_advected = cfg::number_or(tj, "advected", sc.tol_advected);
  }
  return sc;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Tracks initial/current/extreme values of one scalar diagnostic.
struct DriftTracker {
  std::string name;
  double tolerance{0.0};
  double initial{0.0};
  double final_value{0.0};
  double max_abs_dev{0.0};
  bool started{false};

  void observe(double v) {
    if (!started) {
      initial = v;
      started = true;
    }
    final_value = v;
    max_abs_dev = std::fmax(max_abs_dev, std::fabs(v - initial));
  }
  double rel_drift() const {
    const double denom = std::fabs(initial) > 0.0 ? std::fabs(initial) : 1.0;
    return max_abs_dev / denom;
  }
  bool pass() const { return rel_drift() <= tolerance; }
};

inline nlohmann::json to_json(const DriftTracker& d) {
  return {{"name", d.name},          {"initial", d.initial},
          {"final", d.final_value},  {"max_rel_drift", d.rel_drift()},
          {"tolerance", d.tolerance}, {"pass", d.pass()}};
}

inline std::filesystem::path resolve_output_dir(const CliOptions& opt) {
  if (opt.output_dir) return *opt.output_dir;
  if (const char* env = std::getenv("GYROSTAT_OUTPUT_DIR")) return env;
  return std::filesystem::current_path();
}

}  // namespace detail

/// Outcome of a scenario run: whether all configured checks passed, plus the
/// written file locations.
struct ScenarioOutcome {
  bool all_pass{true};
  std::filesystem::path trajectory_path;
  std::filesystem::path report_path;
};

/// Runs a simulation scenario: integrates, writes the trajectory CSV and the
/// report, and evaluates the conservation checks appropriate to the case and
/// control. Throws ConfigError / NonFiniteError; returns the check outcome.
inline ScenarioOutcome run_scenario(const std::string& config_path, const CliOptions& opt = {}) {
  const Scenario base = parse_scenario(cfg::load_file(config_path));
  Scenario sc = base;
  if (opt.stride) sc.stride = *opt.stride;

  namespace fs = std::filesystem;
  const fs::path outdir = detail::resolve_output_dir(opt);
  fs::create_directories(outdir);
  const fs::path traj_path = outdir / sc.trajectory_name;
  const fs::path report_path = outdir / sc.report_name;

  std::ofstream csv(traj_path);
  if (!csv) throw ConfigError("outputs.trajectory", "cannot open " + traj_path.string());

  const bool full = sc.attitude.has_value();
  const bool conservative = sc.control.kind == ControlSpec::Kind::none;
  const bool coincident = sc.kind == CaseKind::coincident;

  std::vector<detail::DriftTracker> checks;
  auto add_check = [&checks](const std::string& name, double tol) {
    checks.push_back({name, tol});
    return checks.size() - 1;
  };

  std::size_t ix_h = 0, ix_c1 = 0, ix_c2 = 0, ix_l = 0, ix_mu = 0, ix_adv = 0;
  if (conservative) ix_h = add_check("energy", sc.tol_energy);
  if (coincident) {
    ix_c1 = add_check("casimir_pi2", sc.tol_casimir);
  } else {
    ix_c1 = add_check("casimir_pigamma", sc.tol_casimir);
    ix_c2 = add_check("casimir_gamma2", sc.tol_casimir);
  }
  if (conservative) ix_l = add_check("rotor_momentum", sc.tol_rotor_momentum);
  if (full) {
    ix_mu = add_check(coincident ? "spatial_momentum" : "momentum_gravity_axis",
                      sc.tol_spatial_momentum);
    if (!coincident) ix_adv = add_check("advected_vector", sc.tol_advected);
  }

  // Header.
  csv << "t,Pi1,Pi2,Pi3";
  if (!coincident) csv << ",Gamma1,Gamma2,Gamma3";
  csv << ",alpha,l,H,";
  csv << (coincident ? "casimir_pi2" : "casimir_pigamma,casimir_gamma2");
  if (full) csv << ",mu1,mu2,mu3";
  csv << "\n";

  // Momentum references for the non-coincident Noether projection.
  Vec3 axis_ref{};
  bool have_axis = false;

  auto write_row = [&](double t, const Mat3* A, const ReducedStateN& s) {
    const ReducedStateC sc_state{s.Pi, s.alpha, s.l};
    const double H = coincident ? hamiltonian_c(sc_state, sc.params) : hamiltonian_n(s, sc.params);
    csv << detail::fmt17(t) << ',' << detail::fmt17(s.Pi.x) << ',' << detail::fmt17(s.Pi.y) << ','
        << detail::fmt17(s.Pi.z);
    if (!coincident)
      csv << ',' << detail::fmt17(s.Gamma.x) << ',' << detail::fmt17(s.Gamma.y) << ','
          << detail::fmt17(s.Gamma.z);
    csv << ',' << detail::fmt17(s.alpha) << ',' << detail::fmt17(s.l) << ',' << detail::fmt17(H);
    if (coincident) {
      const double c = norm_sq(s.Pi);
      csv << ',' << detail::fmt17(c);
      checks[ix_c1].observe(c);
    } else {
      const double c1 = dot(s.Pi, s.Gamma);
      const double c2 = norm_sq(s.Gamma);
      csv << ',' << detail::fmt17(c1) << ',' << detail::fmt17(c2);
      checks[ix_c1].observe(c1);
      checks[ix_c2].observe(c2);
    }
    if (full && A) {
      const Vec3 mu = spatial_momentum(*A, s.Pi);
      csv << ',' << detail::fmt17(mu.x) << ',' << detail::fmt17(mu.y) << ','
          << detail::fmt17(mu.z);
      if (coincident) {
        // Track each component through the norm-style tracker: use the max
        // deviation of the vector relative to its initial norm.
        if (!have_axis) {
          axis_ref = mu;
          have_axis = true;
          checks[ix_mu].observe(norm(mu));
        } else {
          const double dev = norm(mu - axis_ref);
          checks[ix_mu].max_abs_dev = std::fmax(checks[ix_mu].max_abs_dev, dev);
          checks[ix_mu].final_value = norm(mu);
        }
      } else {
        const Vec3 a = *A * s.Gamma;
        if (!have_axis) {
          axis_ref = a;
          have_axis = true;
          checks[ix_adv].observe(0.0);
          checks[ix_adv].initial = 1.0;  // report drift as an absolute gap
        } else {
          checks[ix_adv].final_value = norm(a - axis_ref);
          checks[ix_adv].max_abs_dev =
              std::fmax(checks[ix_adv].max_abs_dev, norm(a - axis_ref));
        }
        checks[ix_mu].observe(dot(mu, axis_ref));
      }
    }
    csv << '\n';
    if (conservative) {
      checks[ix_h].observe(H);
      checks[ix_l].observe(s.l);
    }
  };

  const InertiaParams p = sc.params;
  const ControlSpec cs = sc.control;

  if (coincident) {
    const ReducedStateC s0{sc.initial.Pi, sc.initial.alpha, sc.initial.l};
    ControlLaw<ReducedStateC> u;
    if (cs.kind == ControlSpec::Kind::constant) u = constant_control<ReducedStateC>(cs.value);
    if (cs.kind == ControlSpec::Kind::linear_feedback)
      u = feedback_control<ReducedStateC>(cs.value);
    if (full) {
      const FullStateC f0{*sc.attitude, s0};
      const auto field = [&](const FullStateC& s, double t) { return vf_full(s, p, u, t); };
      IntegrateOptions<FullStateC> io;
      io.stride = sc.stride;
      io.observer = [&](double t, const FullStateC& s) {
        write_row(t, &s.A, {s.reduced.Pi, {}, s.reduced.alpha, s.reduced.l});
      };
      if (sc.integrator == IntegratorKind::rk4)
        integrate_rk4(field, f0, sc.dt, sc.steps, io);
      else
        integrate_lie_rkmk4(field, f0, sc.dt, sc.steps, io);
    } else {
      const auto field = [&](const ReducedStateC& s, double t) {
        return apply_control(vf_reduced_c(s, p), u, s, t);
      };
      IntegrateOptions<ReducedStateC> io;
      io.stride = sc.stride;
      io.observer = [&](double t, const ReducedStateC& s) {
        write_row(t, nullptr, {s.Pi, {}, s.alpha, s.l});
      };
      integrate_rk4(field, s0, sc.dt, sc.steps, io);
    }
  } else {
    const ReducedStateN s0 = sc.initial;
    ControlLaw<ReducedStateN> u;
    if (cs.kind == ControlSpec::Kind::constant) u = constant_control<ReducedStateN>(cs.value);
    if (cs.kind == ControlSpec::Kind::linear_feedback)
      u = feedback_control<ReducedStateN>(cs.value);
    if (full) {
      const FullStateN f0{*sc.attitude, s0};
      const auto field = [&](const FullStateN& s, double t) { return vf_full(s, p, u, t); };
      IntegrateOptions<FullStateN> io;
      io.stride = sc.stride;
      io.observer = [&](double t, const FullStateN& s) { write_row(t, &s.A, s.reduced); };
      if (sc.integrator == IntegratorKind::rk4)
        integrate_rk4(field, f0, sc.dt, sc.steps, io);
      else
        integrate_lie_rkmk4(field, f0, sc.dt, sc.steps, io);
    } else {
      const auto field = [&](const ReducedStateN& s, double t) {
        return apply_control(vf_reduced_n(s, p), u, s, t);
      };
      IntegrateOptions<ReducedStateN> io;
      io.stride = sc.stride;
      io.observer = [&](double t, const ReducedStateN& s) { write_row(t, nullptr, s); };
      integrate_rk4(field, s0, sc.dt, sc.steps, io);
    }
  }
  csv.close();

  nlohmann::json report;
  report["config"] = config_path;
  report["checks"] = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    report["checks"].push_back(detail::to_json(c));
    all_pass = all_pass && c.pass();
    if (!opt.quiet)
      std::cout << "check " << c.name << ": " << (c.pass() ? "PASS" : "FAIL")
                << " (max_rel_drift=" << c.rel_drift() << ", tol=" << c.tolerance << ")\n";
  }
  report["pass"] = all_pass;
  std::ofstream rep(report_path);
  if (!rep) throw ConfigError("outputs.report", "cannot open " + report_path.string());
  rep << report.dump(2) << "\n";

  return {all_pass, traj_path, report_path};
}

/// Exit-code wrapper around run_scenario: 0 all checks pass, 1 check failure
/// or integration blow-up, 2 config error.
inline int run_scenario_exit(const std::string& config_path, const CliOptions& opt = {}) {
  try {
    return run_scenario(config_path, opt).all_pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const NonFiniteError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace gyrostat
