#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rayleigh/logmean.hpp"
#include "rayleigh/scenario.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_csv_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) throw std::invalid_argument("bad number in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return json::parse(f);
}

void print_certifications(const json& diag) {
  if (!diag.contains("certifications")) return;
  int pass = 0, fail = 0, idle = 0;
  for (const auto& c : diag["certifications"]) {
    const std::string status = c.at("status").get<std::string>();
    if (status == "pass") ++pass;
    else if (status == "fail") ++fail;
    else ++idle;
    if (status == "fail")
      std::cout << "  FAIL " << c.at("name").get<std::string>() << " at t="
                << c.value("first_failure_t", 0.0) << " margin=" << c.value("min_margin", 0.0)
                << "\n";
  }
  std::cout << "certifications: " << pass << " pass, " << fail << " fail, " << idle
            << " not-applicable\n";
}

int cmd_run(const rayleigh::ScenarioConfig& cfg) {
  const rayleigh::RunReport rep = rayleigh::run_scenario(cfg);
  const json& body = rep.body;
  std::cout << "system " << cfg.system << (cfg.preset.empty() ? "" : " preset " + cfg.preset)
            << "\n";
  if (body.contains("stop"))
    std::cout << "stop: " << body["stop"]["reason"].get<std::string>() << " at t="
              << body["stop"]["t"].get<double>() << " after " << body["stop"]["steps"].get<long>()
              << " steps\n";
  if (body.contains("diagnostics")) print_certifications(body["diagnostics"]);
  std::cout << "wrote " << cfg.out_dir << "/report.json\n";
  return rep.exit_status;
}

int cmd_verify_dictionary(rayleigh::ScenarioConfig cfg, int levels, const std::string& out_dir) {
  const json study = rayleigh::dictionary_study(cfg, levels);
  std::filesystem::create_directories(out_dir);
  std::ofstream f(out_dir + "/dictionary.json");
  f << study.dump(2) << "\n";
  for (const auto& [key, val] : study.at("identities").items()) {
    std::cout << (val.at("pass").get<bool>() ? "pass " : "FAIL ") << key << " residuals";
    for (const auto& r : val.at("residuals")) std::cout << " " << r.get<double>();
    if (!val.at("orders").empty())
      std::cout << " order " << val.at("orders").back().get<double>();
    std::cout << "\n";
  }
  std::cout << "wrote " << out_dir << "/dictionary.json\n";
  return study.at("all_passed").get<bool>() ? 0 : 2;
}

int cmd_log_mean(const std::vector<double>& values, const std::vector<double>& ps) {
  rayleigh::WeightedSamples ws;
  ws.values = values;
  ws.weights.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  const rayleigh::LimitStudy study = rayleigh::limit_study(ws, ps);
  const json j = rayleigh::to_json(study);
  std::cout << j.dump(2) << "\n";
  return j.at("nonincreasing").get<bool>() && j.at("jensen_ok").get<bool>() ? 0 : 2;
}

int cmd_report(const std::string& dir) {
  const json rep = load_json_file(dir + "/report.json");
  std::cout << "system " << rep.value("system", std::string("?"));
  if (rep.contains("preset") && !rep["preset"].is_null())
    std::cout << " preset " << rep["preset"].get<std::string>();
  std::cout << "\n";
  if (rep.contains("stop"))
    std::cout << "stop: " << rep["stop"]["reason"].get<std::string>() << " at t="
              << rep["stop"]["t"].get<double>() << "\n";
  if (rep.contains("diagnostics")) {
    const json& diag = rep["diagnostics"];
    print_certifications(diag);
    if (diag.contains("necessary_conditions") &&
        diag["necessary_conditions"].value("applicable", false))
      std::cout << "negative-pair budgets tracked (both functionals started negative)\n";
  }
  return rep.value("exit_status", 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydrostatic channel flow and semi-Lagrangian torus flow laboratory"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, values_csv, report_dir;
  std::string plist_csv = "1,0.5,0.1,0.01,0.001";
  int nx = 0, ny = 0, na = 0, cadence = 0, snapshot_steps = -1, levels = 3;
  double dt = std::nan(""), t_end = std::nan(""), probe_t = 0.1;

  auto* run = app.add_subcommand("run", "integrate a scenario and certify its diagnostics");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--preset", preset, "named built-in configuration");
  run->add_option("--nx", nx);
  run->add_option("--ny", ny);
  run->add_option("--na", na);
  run->add_option("--dt", dt, "fixed step; 0 selects CFL-driven steps");
  run->add_option("--t-end", t_end);
  run->add_option("--cadence", cadence, "steps between series rows");
  run->add_option("--snapshot-steps", snapshot_steps, "steps between field snapshots; 0 disables");
  run->add_option("--out", out_dir, "output directory");

  auto* vd = app.add_subcommand("verify-dictionary",
                                "refinement study of the change-of-variable identities");
  vd->add_option("--config", config_path);
  vd->add_option("--preset", preset)->default_str("sl-pinned");
  vd->add_option("--t-end", probe_t, "time about which the identities are probed");
  vd->add_option("--levels", levels)->check(CLI::Range(2, 5));
  vd->add_option("--out", out_dir);

  auto* lm = app.add_subcommand("log-mean", "p-norm limit study for a sample list");
  lm->add_option("--values", values_csv, "comma separated positive samples")->required();
  lm->add_option("--p-list", plist_csv, "comma separated decreasing exponents");

  auto* rp = app.add_subcommand("report", "summarize a finished run directory");
  rp->add_option("--dir", report_dir, "directory holding report.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(lm)) return cmd_log_mean(parse_csv_numbers(values_csv),
                                                    parse_csv_numbers(plist_csv));
    if (app.got_subcommand(rp)) return cmd_report(report_dir);

    rayleigh::ScenarioConfig cfg;
    if (!config_path.empty())
      cfg = rayleigh::ScenarioConfig::from_json(load_json_file(config_path));
    else if (!preset.empty())
      cfg = rayleigh::ScenarioConfig::preset_config(preset);
    else if (app.got_subcommand(vd))
      cfg = rayleigh::ScenarioConfig::preset_config("sl-pinned");
    else
      throw std::invalid_argument("need --config or --preset");

    if (nx > 0) cfg.nx = nx;
    if (ny > 0) cfg.ny = ny;
    if (na > 0) cfg.na = na;
    if (!std::isnan(dt)) cfg.dt = dt;
    if (!std::isnan(t_end)) cfg.t_end = t_end;
    if (cadence > 0) cfg.diagnostic_steps = cadence;
    if (snapshot_steps >= 0) cfg.snapshot_steps = snapshot_steps;
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (app.got_subcommand(vd)) {
      cfg.t_end = probe_t;
      cfg.validate();
      return cmd_verify_dictionary(cfg, levels, out_dir.empty() ? cfg.out_dir : out_dir);
    }
    cfg.validate();
    return cmd_run(cfg);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
}
