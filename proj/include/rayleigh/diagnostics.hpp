#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rayleigh/grid.hpp"
#include "rayleigh/hydrostatic.hpp"

namespace rayleigh {

// Constants computed once from the initial state and frozen for the run.
struct PaperConstants {
  double omega0_inf = 0.0;
  double min_abs_omega0 = 0.0;
  double min_ray0 = 0.0;  // min of dy(omega0)
  double max_ray0 = 0.0;
  double u_l2sq = 0.0;
  double e1_0 = 0.0;
  double e2_0 = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  bool ratio_ok = false;  // min|omega0| > 0
  double c_ratio = 0.0;   // 3 + 2|w0|inf / min|w0|
  double c_tilde = 0.0;   // 1/2 + c_ratio/2
  bool rayleigh0_ok = false;
  double inv_ray0_inf = 0.0;    // sup of 1/dy(omega0)
  double weighted_x0_l2 = 0.0;  // L2 norm of dx(omega0)/sqrt(dy(omega0))
  double log_budget = 0.0;      // int log(2 |w0|inf / dy(omega0))
  double pole_e1 = 0.0;         // 1/e1_0 when e1_0 > 0
  double pole_e2 = 0.0;         // u_l2sq/e2_0 when e2_0 > 0
};

PaperConstants paper_constants(const FlowState& s0);
nlohmann::json to_json(const PaperConstants& k);

// Everything measured at one time sample. Doubles first (the CSV column
// order), flags after. When the Rayleigh function loses positivity the
// dependent values are written as 0 with rayleigh_ok = false.
struct DiagnosticRecord {
  double t = 0;
  double e1 = 0, e2 = 0, d1 = 0, d2 = 0;
  double min_rayleigh = 0, max_rayleigh = 0, log_rayleigh = 0;
  double kinetic = 0, u_inf = 0, omega_inf = 0, gauge_dev = 0;
  double px_l2 = 0;          // int Px^2 dx
  double sup_drive = 0;      // sup |w wx/wy - ux|, the M(t) integrand
  double weighted_x_l2 = 0;  // sqrt(int wx^2/wy)
  double m_accum = 0;
  double cum_d1 = 0, cum_d2 = 0, cum_px_l2 = 0, cum_abs_e1 = 0, cum_mixed_x2 = 0;
  double lb_e1 = 0, lb_e2 = 0, log_lb_e1 = 0, log_lb_e2 = 0;
  double e1_form_gap = 0, e2_form_gap = 0;
  double tail_fraction = 0;
  bool rayleigh_ok = true;
  bool lb_e1_on = false, lb_e2_on = false;
  // Certification flags; true means the inequality holds or does not apply.
  bool ok_cs_e1 = true, ok_cs_e2 = true;
  bool ok_kinetic = true, ok_gauge = true, ok_uinf = true, ok_maxprin = true;
  bool ok_mono_e1 = true, ok_mono_e2 = true;
  bool ok_lb_e1 = true, ok_log_lb_e1 = true, ok_lb_e2 = true, ok_log_lb_e2 = true;
  bool ok_budget_e1 = true, ok_budget_e2 = true;
  bool ok_px_budget = true, ok_abs_e1_budget = true;
  bool ok_cont_inv_ray = true, ok_cont_ray = true, ok_cont_weighted = true;
  bool ok_cont_e1 = true, ok_cont_e2 = true;
  bool ok_ident_e1 = true, ok_ident_e2 = true;
};

std::string diagnostic_csv_header();
std::string diagnostic_csv_row(const DiagnosticRecord& r);

// Raw functional values of one state; no accumulators, no certification.
struct FunctionalSample {
  bool rayleigh_ok = false;
  double min_ray = 0, max_ray = 0;
  double e1_a = 0, e1_b = 0;  // int w wx/wy and int (w wx/wy - ux)
  double e2_a = 0, e2_b = 0;
  double d1 = 0, d2 = 0;
  double log_ray = 0;  // int log(ray0/wy); 0 when ray0 not supplied
  double sup_drive = 0, weighted_x_l2sq = 0, mixed_x2 = 0;
  double kinetic = 0, u_inf = 0, omega_inf = 0, wx_inf = 0, px_l2 = 0, gauge_dev = 0;
  double tail_fraction = 0;
};

FunctionalSample functional_sample(const FlowState& s, const ScalarField2D* ray0 = nullptr);

// Collapse-safe single functionals (empty optional once min w_y <= 0).
std::optional<double> e1_functional(const FlowState& s);
std::optional<double> e2_functional(const FlowState& s);
std::optional<std::pair<double, double>> dissipations(const FlowState& s);
std::optional<double> log_rayleigh(const ScalarField2D& omega, const ScalarField2D& omega0);

struct LowerBounds {
  bool e1_on = false, e2_on = false;
  bool pole_e1_passed = false, pole_e2_passed = false;
  double lb_e1 = 0, lb_e2 = 0, log_lb_e1 = 0, log_lb_e2 = 0;
};

// Reciprocal-in-time lower bounds and their log forms, valid while the
// corresponding E(0) > 0 and t is below the pole.
LowerBounds lower_bounds(double t, const PaperConstants& k);

struct SlackOptions {
  double abs = 1e-9;
  double rel = 1e-6;
};

// Stateful per-run evaluator: accumulates time integrals, certifies every
// inequality per sample, and produces the run-level report.
class DiagnosticEngine {
 public:
  explicit DiagnosticEngine(const FlowState& s0, SlackOptions slack = {});

  const PaperConstants& constants() const { return k_; }
  DiagnosticRecord sample(const FlowState& s);
  const std::vector<DiagnosticRecord>& history() const { return hist_; }

  nlohmann::json summary() const;
  bool all_passed() const;

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
  bool certify(const std::string& name, bool applicable, double lhs, double rhs, double t,
               double extra_slack = 0.0);

  SlackOptions slack_;
  PaperConstants k_;
  ScalarField2D ray0_;
  ScalarField2D omega0_;
  std::vector<DiagnosticRecord> hist_;
  std::vector<Tracker> trackers_;

  bool have_prev_ = false;
  double prev_t_ = 0;
  double prev_d1_ = 0, prev_d2_ = 0, prev_abs_e1_ = 0, prev_px_l2_ = 0;
  double prev_drive_ = 0, prev_mixed_ = 0;
  double prev_e1_ = 0, prev_e2_ = 0;
  double m_accum_ = 0, cum_d1_ = 0, cum_d2_ = 0, cum_px_l2_ = 0, cum_abs_e1_ = 0,
         cum_mixed_x2_ = 0;

  bool e1_stayed_nonpos_ = true, e2_stayed_nonpos_ = true;
  std::optional<double> first_e1_positive_t_, first_e2_positive_t_;

  bool stat_triggered_ = false;
  bool stat_failed_ = false;
  double stat_trigger_t_ = 0;
  double stat_max_drift_ = 0, stat_max_slope_ = 0;
  ScalarField2D stat_ref_;  // snapshot at trigger time; starts as omega0
};

}  // namespace rayleigh
