#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rayleigh/grid.hpp"
#include "rayleigh/hydrostatic.hpp"

namespace rayleigh {

struct Thresholds {
  double eps_ray_rel = 1e-3;   // collapse stop at this fraction of the initial margin
  double tail_fraction = 1e-4; // resolution-loss stop
  double curl_budget = 1e-6;   // d = 2 gradient-structure drift stop
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string system = "hydrostatic";  // | semilagrangian-1d | semilagrangian-2d | log-mean-study
  std::string preset;
  std::string omega_expr;
  std::vector<std::string> v_exprs;
  std::string ha_expr;
  std::string xderiv = "spectral";  // | fd4
  int nx = 128, ny = 513, na = 65;
  double k = 0.0;
  double dt = 1e-3;       // <= 0 switches to CFL-driven stepping
  double cfl_target = 0.4;
  double cfl_max = 0.5;
  double t_end = 1.0;
  int diagnostic_steps = 10;
  int snapshot_steps = 0;  // 0 disables snapshots
  Thresholds thresholds;
  std::vector<double> lp_list{1.0, 0.5, 0.1, 0.01, 0.001};
  std::string out_dir = "out";

  static ScenarioConfig preset_config(const std::string& name);
  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;  // throws std::invalid_argument
};

struct RunReport {
  StopReason stop = StopReason::ReachedTEnd;
  double t_final = 0;
  long steps = 0;
  bool all_passed = true;
  double wall_ms = 0;
  std::vector<std::string> files;
  nlohmann::json body;
  int exit_status = 0;
};

// Sample the configured initial vorticity on the configured grid, with the
// one-time spectral truncation applied.
ScalarField2D initial_vorticity(const ScenarioConfig& cfg);

RunReport run_scenario(const ScenarioConfig& cfg);

// Three-level refinement study of the change-of-variable identities around
// t = cfg.t_end; returns residuals, observed orders, and per-identity flags.
nlohmann::json dictionary_study(const ScenarioConfig& cfg, int levels = 3);

}  // namespace rayleigh
