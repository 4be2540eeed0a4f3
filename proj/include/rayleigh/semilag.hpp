#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rayleigh/hydrostatic.hpp"
#include "rayleigh/torus.hpp"

namespace rayleigh {

// Velocity/thickness pair on the torus with the label coordinate a. The
// thickness ha plays the role of 1/w_y under the level-set change of
// variables; it must stay positive and carry unit mass in a at every
// spatial node.
struct SemiLagrangianState {
  int d = 1;
  double t = 0;
  double k = 0;  // base level of the vorticity ladder (d = 1 dictionary)
  TorusField v;
  TorusField ha;

  SemiLagrangianState(int d_, TorusField v_, TorusField ha_, double k_ = 0, double t0 = 0);
};

// Level function h(x, a) on the x-a grid, a-fastest like TorusField planes.
struct LevelSetMap {
  int nx = 0;
  int na = 0;
  std::vector<double> h;
  double at(int i, int m) const { return h[static_cast<std::size_t>(i) * na + m]; }
  double& at(int i, int m) { return h[static_cast<std::size_t>(i) * na + m]; }
};

struct SlExtract {
  LevelSetMap map;
  TorusField v;   // d = 1 velocity on (nx, na)
  TorusField ha;  // 2nd-order a-derivative of the map, then usable as state
};

// Invert w(x, h) = k + a column by column on a monotone cubic interpolant.
// Requires pinned boundary vorticity w(.,0) = k, w(.,1) = k+1 (within 1e-8)
// and strictly increasing columns.
SlExtract sl_from_vorticity(const FlowState& s, double k, int na);

// Sup-norm residuals of the nine change-of-variable identities, evaluated
// at the middle state with central time differences from the outer two.
nlohmann::json dictionary_residuals(const FlowState& before, const FlowState& mid,
                                    const FlowState& after, double k, int na);

struct HsleDerivative {
  TorusField dv;
  TorusField dha;
  TorusField pressure;        // spatial-only scalar
  double pressure_mean = 0;   // magnitude of the projected-out source mean
};

HsleDerivative hsle_rhs(const SemiLagrangianState& s);

double admissible_dt_sl(const SemiLagrangianState& s, double cfl_max = 0.5);
void hsle_step(SemiLagrangianState& s, double dt, double cfl_max = 0.5);

double curl_sup(const TorusField& v);         // 0 for d = 1
double mass_deviation(const TorusField& ha);  // max over nodes of |int ha da - 1|
double tail_fraction_sl(const TorusField& f); // worst spectral tail over lines

// Initial-data projection: normalize the a-mass per node and remove the
// x-varying (d=1) or divergence (d=2) part of the mean flux int v ha da.
struct CompatibilityReport {
  double mass_shift = 0;
  double flux_shift = 0;
};
CompatibilityReport enforce_compatibility(SemiLagrangianState& s);

struct SlRecord {
  double t = 0;
  double e1 = 0, e2 = 0, d1 = 0, d2 = 0;
  double entropy = 0, kinetic = 0;
  double bcc_lhs = 0, bcc_rhs = 0;
  double min_ha = 0, mass_dev = 0, curl = 0, pressure_mean = 0;
  double cum_d1 = 0, cum_d2 = 0, cum_e1 = 0;
  double lb_e1 = 0, lb_e2 = 0, log_lb = 0;
  double lp_gap = 0, lp_mono_min = 0;
  double tail_fraction = 0;
  bool resolved = true;
  bool lb_e1_on = false, lb_e2_on = false;
  bool ok_mass = true, ok_kinetic = true, ok_bcc_lhs = true, ok_bcc_rhs = true;
  bool ok_cs_e1 = true, ok_cs_e2 = true;
  bool ok_lb_e1 = true, ok_log_lb = true, ok_lb_e2 = true;
  bool ok_ident_e1 = true, ok_ident_e2 = true, ok_ident_entropy = true;
  bool ok_jensen = true, ok_lp_mono = true;
};

std::string sl_csv_header();
std::string sl_csv_row(const SlRecord& r);

// Per-run evaluator for the semi-Lagrangian system, mirroring the channel
// engine: accumulators, per-sample inequality certification, run summary.
class SlDiagnosticEngine {
 public:
  SlDiagnosticEngine(const SemiLagrangianState& s0, std::vector<double> lp_list);

  SlRecord sample(const SemiLagrangianState& s);
  const std::vector<SlRecord>& history() const { return hist_; }
  nlohmann::json summary() const;
  bool all_passed() const;

  double kinetic0() const { return kinetic0_; }
  double e1_0() const { return e1_0_; }

 private:
  struct Tracker {
    std::string name;
    bool seen = false;
    bool failed = false;
    double first_violation_t = 0;
    double min_margin = 0;
    int violations = 0;
    void update(bool applicable, bool ok, double margin, double t);
    nlohmann::json to_json() const;
  };
  Tracker& tracker(const std::string& name);
  bool certify(const std::string& name, bool applicable, double lhs, double rhs, double t);

  int d_ = 1;
  std::vector<double> lp_list_;
  double kinetic0_ = 0, e1_0_ = 0, e2_0_ = 0, entropy0_ = 0;
  double bcc_lhs0_ = 0, bcc_rhs0_ = 0;
  double pole_e1_ = 0, pole_e2_ = 0;
  std::vector<SlRecord> hist_;
  std::vector<Tracker> trackers_;

  bool have_prev_ = false;
  double prev_t_ = 0, prev_d1_ = 0, prev_d2_ = 0, prev_e1_ = 0;
  double cum_d1_ = 0, cum_d2_ = 0, cum_e1_ = 0;
};

}  // namespace rayleigh
