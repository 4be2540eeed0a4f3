// Acceptance gate. Each numbered case exercises one release criterion end to
// end and prints exactly one [PASS]/[FAIL] line. Run with the case id
// (01..10) as the only argument; the exit code follows the verdict.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rayleigh/diagnostics.hpp"
#include "rayleigh/expr.hpp"
#include "rayleigh/logmean.hpp"
#include "rayleigh/scenario.hpp"
#include "rayleigh/semilag.hpp"

using namespace rayleigh;
namespace fs = std::filesystem;

namespace {

constexpr double kE1Exact = 0.9720121497572859;  // 2*pi*(2/sqrt(3) - 1)
constexpr double kPoleE1 = 1.028793724697477;
constexpr double kRootE = 1.6487212707001282;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  void note(const std::string& s) {
    if (ok) detail = s;
  }
};

FlowState preset_flow(const char* preset, int nx = 0, int ny = 0) {
  ScenarioConfig c = ScenarioConfig::preset_config(preset);
  if (nx > 0) c.nx = nx;
  if (ny > 0) c.ny = ny;
  return FlowState(initial_vorticity(c));
}

// the production stepping policy: configured dt, CFL ceiling, and the
// contraction-rate ceiling that keeps the collapse window resolved
double policy_dt(const FlowState& s, const DiagnosticRecord& rec, double dt_cfg, double t_end,
                 double cfl_max = 0.5) {
  double dt = std::min(dt_cfg, admissible_dt(s, cfl_max));
  if (rec.rayleigh_ok && rec.sup_drive > 0.0) dt = std::min(dt, 0.05 / rec.sup_drive);
  return std::min(dt, t_end - s.t);
}

struct HydroRun {
  DiagnosticEngine eng;
  std::vector<DiagnosticRecord> recs;
  bool collapsed = false;
  double t_final = 0;
};

HydroRun run_watched(FlowState s, double dt_cfg, double t_end) {
  HydroRun out{DiagnosticEngine(s), {}, false, 0};
  const double eps_ray = 1e-3 * out.eng.constants().min_ray0;
  DiagnosticRecord rec = out.eng.sample(s);
  out.recs.push_back(rec);
  while (s.t < t_end - 1e-12) {
    const double dt = policy_dt(s, rec, dt_cfg, t_end);
    if (!(dt > 0)) break;
    step_rk4(s, dt);
    rec = out.eng.sample(s);
    out.recs.push_back(rec);
    if (!rec.rayleigh_ok || rec.min_rayleigh <= eps_ray) {
      out.collapsed = true;
      break;
    }
    if (rec.tail_fraction > 1e-4) break;
  }
  out.t_final = s.t;
  return out;
}

SemiLagrangianState wave_state() {
  const ScenarioConfig c = ScenarioConfig::preset_config("sl-wave");
  const Expression ve = Expression::parse(c.v_exprs[0]);
  const Expression he = Expression::parse(c.ha_expr);
  TorusField v(1, c.nx, 1, c.na, 1), ha(1, c.nx, 1, c.na, 1);
  for (int i = 0; i < c.nx; ++i) {
    const double x = static_cast<double>(i) / c.nx;
    for (int m = 0; m < c.na; ++m) {
      const double a = static_cast<double>(m) / (c.na - 1);
      v.at(0, i, m) = ve(x, 0.0, a);
      ha.at(0, i, m) = he(x, 0.0, a);
    }
  }
  dealias_torus(v);
  dealias_torus(ha);
  SemiLagrangianState s(1, std::move(v), std::move(ha), c.k);
  enforce_compatibility(s);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- criteria

Verdict criterion_01() {
  Verdict v;
  char buf[160];
  const struct {
    int nx, ny;
    double tol;
  } cases[] = {{128, 513, 1e-4}, {256, 2049, 1e-6}};
  double rel[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    FlowState s = preset_flow("paper-remark", cases[c].nx, cases[c].ny);
    const PaperConstants k = paper_constants(s);
    rel[c] = std::abs(k.e1_0 - kE1Exact) / kE1Exact;
    std::snprintf(buf, sizeof buf, "e1 rel err %.3e at %dx%d exceeds %.0e", rel[c], cases[c].nx,
                  cases[c].ny, cases[c].tol);
    v.require(rel[c] <= cases[c].tol, buf);
  }
  std::snprintf(buf, sizeof buf, "e1 rel err %.3e (128x513), %.3e (256x2049)", rel[0], rel[1]);
  v.note(buf);
  return v;
}

Verdict criterion_02() {
  Verdict v;
  const double dt = 1e-3, t_end = 0.3;
  const double rel_tol = 1e-3;
  // central differences need the local rate resolved; past this the sampled
  // window has ended anyway because the run stops
  const double theta_max = 0.035;

  ScenarioConfig cfg = ScenarioConfig::preset_config("paper-remark");
  FlowState s(initial_vorticity(cfg));
  const ScalarField2D ray0 = ddy(s.omega);
  const double min_ray0 = min_of(ray0);

  struct Row {
    double t, e1, e2, d1, d2, lr, drive;
  };
  std::vector<Row> rows;
  while (s.t < t_end - 1e-12) {
    const FunctionalSample f = functional_sample(s, &ray0);
    if (!f.rayleigh_ok || f.min_ray <= 1e-3 * min_ray0 || f.tail_fraction > 1e-4) break;
    rows.push_back({s.t, f.e1_a, f.e2_a, f.d1, f.d2, f.log_ray, f.sup_drive});
    // uniform steps keep the central differences second order; the guard is
    // relaxed to its stability role since dt is pinned by the suite
    step_rk4(s, dt, 1.0);
  }

  int checked = 0;
  double worst1 = 0, worst2 = 0, worst3 = 0;
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
    if (rows[k].drive * dt > theta_max) break;
    const double r1 = std::abs((rows[k + 1].e1 - rows[k - 1].e1) / (2 * dt) - rows[k].d1) /
                      std::max(std::abs(rows[k].d1), 1e-8);
    const double r2 = std::abs((rows[k + 1].e2 - rows[k - 1].e2) / (2 * dt) - rows[k].d2) /
                      std::max(std::abs(rows[k].d2), 1e-8);
    const double r3 = std::abs((rows[k + 1].lr - rows[k - 1].lr) / (2 * dt) - rows[k].e1) /
                      std::max(std::abs(rows[k].e1), 1e-8);
    worst1 = std::max(worst1, r1);
    worst2 = std::max(worst2, r2);
    worst3 = std::max(worst3, r3);
    ++checked;
  }

  char buf[200];
  std::snprintf(buf, sizeof buf, "only %d resolved samples", checked);
  v.require(checked >= 50, buf);
  std::snprintf(buf, sizeof buf, "identity residuals de1=%.2e de2=%.2e dlog=%.2e over %d samples",
                worst1, worst2, worst3, checked);
  v.require(worst1 <= rel_tol && worst2 <= rel_tol && worst3 <= rel_tol, buf);
  v.note(buf);
  return v;
}

Verdict criterion_03() {
  Verdict v;
  HydroRun run = run_watched(preset_flow("paper-remark"), 1e-3, 2.0);
  const double kin0 = run.recs.front().kinetic;
  const double sup0 = run.eng.constants().omega0_inf;
  double kin_drift = 0, gauge_rel = 0, uinf_excess = -1;
  for (const auto& r : run.recs) {
    kin_drift = std::max(kin_drift, std::abs(r.kinetic - kin0) / kin0);
    gauge_rel = std::max(gauge_rel, r.gauge_dev / std::max(r.u_inf, 1e-300));
    uinf_excess = std::max(uinf_excess, r.u_inf - 1.5 * sup0);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "kinetic drift %.2e (tol 1e-6), gauge %.2e (tol 1e-10), u_inf excess %.2e over "
                "%zu samples to t=%.4f",
                kin_drift, gauge_rel, uinf_excess, run.recs.size(), run.t_final);
  v.require(kin_drift <= 1e-6, buf);
  v.require(gauge_rel <= 1e-10, buf);
  v.require(uinf_excess <= 1e-8, buf);
  v.note(buf);
  return v;
}

Verdict criterion_04() {
  Verdict v;
  char buf[240];

  // positive onset: reciprocal lower bounds hold sample-wise until the stop
  HydroRun run = run_watched(preset_flow("paper-remark"), 1e-3, 2.0);
  const PaperConstants& k = run.eng.constants();
  v.require(std::abs(k.pole_e1 - kPoleE1) <= 1e-3, "pole estimate drifted");
  v.require(run.collapsed, "expected a finite-time stop, reached t_end instead");
  int certified = 0;
  for (const auto& r : run.recs) {
    if (!r.rayleigh_ok || !r.lb_e1_on) continue;
    const double slack = 1e-6 * std::max(1.0, std::abs(r.e1));
    std::snprintf(buf, sizeof buf, "e1 %.6f under bound %.6f at t=%.4f", r.e1, r.lb_e1, r.t);
    v.require(r.e1 >= r.lb_e1 - slack, buf);
    std::snprintf(buf, sizeof buf, "log slope ratio under bound at t=%.4f", r.t);
    v.require(r.log_rayleigh >= r.log_lb_e1 - slack, buf);
    ++certified;
  }
  v.require(certified >= 50, "lower-bound window too short");

  // negative onset: the growth accumulators stay inside their budgets at
  // every horizon across the window where both functionals stay nonpositive
  HydroRun mir = run_watched(preset_flow("paper-remark-mirrored"), 1e-3, 0.1);
  const PaperConstants& km = mir.eng.constants();
  v.require(km.e1_0 < 0 && km.e2_0 < 0, "mirrored onset not negative");
  const double w2 = 4.5 * km.omega0_inf * km.omega0_inf;
  for (const auto& r : mir.recs) {
    if (!r.rayleigh_ok) break;
    v.require(r.e1 <= 1e-9, "mirrored e1 turned positive inside the window");
    v.require(r.e2 <= 1e-9, "mirrored e2 turned positive inside the window");
    std::snprintf(buf, sizeof buf, "cum d1 %.6f exceeds budget %.6f at t=%.4f", r.cum_d1, -km.e1_0,
                  r.t);
    v.require(r.cum_d1 <= -km.e1_0 + 1e-6, buf);
    v.require(r.cum_d2 <= -km.e2_0 + 1e-6, "cum d2 exceeds its budget");
    const double px_budget = 2.0 * (r.e2 - km.e2_0) + w2 * (r.e1 - km.e1_0);
    std::snprintf(buf, sizeof buf, "px accumulator %.6f exceeds %.6f at t=%.4f", r.cum_px_l2,
                  px_budget, r.t);
    v.require(r.cum_px_l2 <= px_budget + 1e-6, buf);
  }
  const nlohmann::json nc = mir.eng.summary().at("necessary_conditions");
  v.require(nc.at("d1").at("e1_stayed_nonpositive").get<bool>(), "nonpositivity flag lost");

  std::snprintf(buf, sizeof buf,
                "pole %.6f, %d bounded samples to stop t=%.4f; mirrored budgets held to t=%.4f",
                k.pole_e1, certified, run.t_final, mir.t_final);
  v.note(buf);
  return v;
}

Verdict criterion_05() {
  Verdict v;
  FlowState s = preset_flow("shear");
  const ScalarField2D w0 = s.omega;
  double drift = 0, d1_max = 0;
  for (int n = 0; n < 1000; ++n) {
    step_rk4(s, 1e-3);
    const auto dd = dissipations(s);
    if (dd) d1_max = std::max(d1_max, dd->first);
    for (std::size_t idx = 0; idx < w0.size(); ++idx)
      drift = std::max(drift, std::abs(s.omega.data()[idx] - w0.data()[idx]));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "stationary drift %.2e (tol 1e-8), d1 max %.2e (tol 1e-12)",
                drift, d1_max);
  v.require(drift <= 1e-8, buf);
  v.require(d1_max <= 1e-12, buf);
  v.note(buf);
  return v;
}

Verdict criterion_06() {
  Verdict v;
  ScenarioConfig c = ScenarioConfig::preset_config("sl-pinned");
  c.t_end = 0.1;
  const nlohmann::json j = dictionary_study(c, 3);
  std::string orders;
  for (const char* key : {"ha", "hx", "va", "vx", "v", "stream", "ht", "vt", "pin"}) {
    const auto& id = j.at("identities").at(key);
    const auto& ord = id.at("orders");
    const double last = ord.empty() ? 99.0 : ord.back().get<double>();
    orders += std::string(key) + "=" + (std::isfinite(last) ? std::to_string(last).substr(0, 4)
                                                            : std::string("inf")) + " ";
    v.require(id.at("pass").get<bool>(), std::string("identity ") + key + " failed, order " +
                                             std::to_string(last));
  }
  v.require(j.at("all_passed").get<bool>(), "study flag false");
  v.note("observed orders: " + orders);
  return v;
}

Verdict criterion_07() {
  Verdict v;
  const double t_end = 0.2;
  double errs[2] = {0, 0};
  for (int level = 0; level < 2; ++level) {
    ScenarioConfig c = ScenarioConfig::preset_config("sl-pinned");
    c.nx = 64 << level;
    c.ny = ((c.ny - 1) << level) + 1;
    c.na = ((c.na - 1) << level) + 1;
    const double dt = 1e-3 / (1 << level);

    FlowState fs(initial_vorticity(c));
    const SlExtract e0 = sl_from_vorticity(fs, c.k, c.na);
    SemiLagrangianState sl(1, e0.v, e0.ha, c.k);
    enforce_compatibility(sl);

    const long n = std::lround(t_end / dt);
    for (long q = 0; q < n; ++q) {
      step_rk4(fs, dt);
      hsle_step(sl, dt);
      enforce_compatibility(sl);
    }
    const SlExtract eT = sl_from_vorticity(fs, c.k, c.na);
    double err = 0;
    for (std::size_t idx = 0; idx < sl.v.v.size(); ++idx) {
      err = std::max(err, std::abs(sl.v.v[idx] - eT.v.v[idx]));
      err = std::max(err, std::abs(sl.ha.v[idx] - eT.ha.v[idx]));
    }
    errs[level] = err;
  }
  const double order = std::log2(errs[0] / errs[1]);
  char buf[160];
  std::snprintf(buf, sizeof buf, "cross-evolution sup errors %.3e -> %.3e, order %.2f", errs[0],
                errs[1], order);
  v.require(order >= 1.5, buf);
  v.note(buf);
  return v;
}

Verdict criterion_08() {
  Verdict v;
  const double dt = 1e-3;
  SemiLagrangianState s = wave_state();
  SlDiagnosticEngine eng(s, {1.0, 0.5, 0.1, 0.01, 0.001});
  std::vector<SlRecord> recs{eng.sample(s)};
  while (s.t < 0.5 - 1e-12) {
    hsle_step(s, dt);
    enforce_compatibility(s);
    const SlRecord r = eng.sample(s);
    recs.push_back(r);
    if (r.tail_fraction > 1e-4 || !r.resolved) break;
  }

  char buf[220];
  const double kin0 = recs.front().kinetic;
  const double lhs0 = recs.front().bcc_lhs, rhs0 = recs.front().bcc_rhs;
  const double e1_0 = recs.front().e1;
  v.require(e1_0 > 0, "wave onset not positive");
  for (const auto& r : recs) {
    v.require(std::abs(r.kinetic - kin0) <= 1e-6 * kin0, "kinetic drifted");
    v.require(std::abs(r.bcc_lhs - lhs0) <= 1e-6 * std::abs(lhs0) + 1e-9, "bcc lhs drifted");
    v.require(std::abs(r.bcc_rhs - rhs0) <= 1e-6 * std::abs(rhs0) + 1e-9, "bcc rhs drifted");
    if (!r.resolved) continue;
    v.require(1.0 * r.d1 >= r.e1 * r.e1 - 1e-9, "quadratic growth floor broken for e1");
    v.require(r.kinetic * r.d2 >= r.e2 * r.e2 - 1e-9, "quadratic growth floor broken for e2");
    if (r.lb_e1_on) {
      const double slack = 1e-6 * std::max(1.0, std::abs(r.e1));
      std::snprintf(buf, sizeof buf, "e1 %.5f under bound %.5f at t=%.4f", r.e1, r.lb_e1, r.t);
      v.require(r.e1 >= r.lb_e1 - slack, buf);
      v.require(r.entropy - recs.front().entropy >= r.log_lb - slack,
                "entropy fell under its logarithmic floor");
    }
  }

  int checked = 0;
  double worst1 = 0, worst2 = 0;
  for (std::size_t k = 1; k + 1 < recs.size(); ++k) {
    if (recs[k].tail_fraction > 1e-6) break;
    const double r1 =
        std::abs((recs[k + 1].e1 - recs[k - 1].e1) / (2 * dt) - recs[k].d1) /
        std::max(std::abs(recs[k].d1), 1e-8);
    const double r2 =
        std::abs((recs[k + 1].e2 - recs[k - 1].e2) / (2 * dt) - recs[k].d2) /
        std::max(std::abs(recs[k].d2), 1e-8);
    worst1 = std::max(worst1, r1);
    worst2 = std::max(worst2, r2);
    ++checked;
  }
  std::snprintf(buf, sizeof buf, "only %d smooth samples", checked);
  v.require(checked >= 40, buf);
  std::snprintf(buf, sizeof buf, "identity residuals %.2e / %.2e (tol 1e-3)", worst1, worst2);
  v.require(worst1 <= 1e-3 && worst2 <= 1e-3, buf);

  std::snprintf(buf, sizeof buf,
                "%zu samples to t=%.3f, identities %.2e / %.2e over %d smooth samples",
                recs.size(), recs.back().t, worst1, worst2, checked);
  v.note(buf);
  return v;
}

Verdict criterion_09() {
  Verdict v;
  const int n = 10000;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = std::exp(static_cast<double>(i) / (n - 1));
  const WeightedSamples s = trapezoid_samples(vals);

  const double near = p_norm(s, 1e-3);
  const double rel = std::abs(near - kRootE) / kRootE;
  const double gm = geometric_mean(s);
  char buf[200];
  std::snprintf(buf, sizeof buf, "p=1e-3 norm %.8f vs sqrt(e) rel %.2e (tol 3e-4)", near, rel);
  v.require(rel <= 3e-4, buf);

  const std::vector<double> ps{1.0, 0.5, 0.1, 0.01, 0.001};
  double prev = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double cur = p_norm(s, ps[i]);
    if (i > 0) v.require(cur <= prev + 1e-12, "p-norm family not nonincreasing");
    v.require(gm <= cur + 1e-12, "geometric mean above a p-norm");
    prev = cur;
  }
  std::snprintf(buf, sizeof buf, "rel %.2e at p=1e-3, family monotone, gm gap %.2e", rel,
                prev - gm);
  v.note(buf);
  return v;
}

Verdict criterion_10() {
  Verdict v;
#ifndef ACCEPTANCE_CLI_PATH
  v.require(false, "CLI path not wired into the build");
  return v;
#else
  const fs::path base = fs::temp_directory_path() / "acceptance-deterministic";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string outs[2] = {(base / "a").string(), (base / "b").string()};
  const int threads[2] = {1, 8};
  for (int c = 0; c < 2; ++c) {
    std::string cmd = "RAYLEIGH_WATCH_THREADS=" + std::to_string(threads[c]) + " \"" +
                      ACCEPTANCE_CLI_PATH + "\" run --preset paper-remark --out \"" + outs[c] +
                      "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    v.require(rc != -1, "could not spawn the CLI");
  }
  const std::string a = slurp(fs::path(outs[0]) / "series.csv");
  const std::string b = slurp(fs::path(outs[1]) / "series.csv");
  v.require(!a.empty(), "first run produced no series");
  v.require(a == b, "series bytes differ between thread counts");
  char buf[120];
  std::snprintf(buf, sizeof buf, "series identical across thread counts (%zu bytes)", a.size());
  v.note(buf);
  return v;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <01..10>\n");
    return 2;
  }
  const std::string id = argv[1];
  Verdict v;
  if (id == "01")
    v = criterion_01();
  else if (id == "02")
    v = criterion_02();
  else if (id == "03")
    v = criterion_03();
  else if (id == "04")
    v = criterion_04();
  else if (id == "05")
    v = criterion_05();
  else if (id == "06")
    v = criterion_06();
  else if (id == "07")
    v = criterion_07();
  else if (id == "08")
    v = criterion_08();
  else if (id == "09")
    v = criterion_09();
  else if (id == "10")
    v = criterion_10();
  else {
    std::fprintf(stderr, "unknown criterion id '%s'\n", id.c_str());
    return 2;
  }
  std::printf("[%s] criterion %s: %s\n", v.ok ? "PASS" : "FAIL", id.c_str(), v.detail.c_str());
  return v.ok ? 0 : 1;
}
