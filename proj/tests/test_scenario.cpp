#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "rayleigh/scenario.hpp"

using namespace rayleigh;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* tag) {
  fs::path p = fs::temp_directory_path() / (std::string("scenario-test-") + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("presets are self-consistent and unknown names are rejected") {
  for (const char* name : {"paper-remark", "paper-remark-mirrored", "shear", "even-x",
                           "sl-pinned", "sl-uniform", "sl-wave", "sl-uniform-2d",
                           "sl-gradient-2d"}) {
    const ScenarioConfig c = ScenarioConfig::preset_config(name);
    CHECK(c.preset == name);
    c.validate();
  }
  CHECK_THROWS_AS(ScenarioConfig::preset_config("no-such-thing"), std::invalid_argument);
}

TEST_CASE("config json round trip") {
  ScenarioConfig c = ScenarioConfig::preset_config("sl-wave");
  c.nx = 32;
  c.dt = 5e-4;
  c.out_dir = "elsewhere";
  const ScenarioConfig back = ScenarioConfig::from_json(c.to_json());
  CHECK(back.system == c.system);
  CHECK(back.nx == 32);
  CHECK(back.dt == doctest::Approx(5e-4));
  CHECK(back.v_exprs == c.v_exprs);
  CHECK(back.ha_expr == c.ha_expr);
  CHECK(back.out_dir == "elsewhere");
  CHECK(back.lp_list == c.lp_list);
}

TEST_CASE("validation rejects inconsistent configs") {
  ScenarioConfig c = ScenarioConfig::preset_config("shear");
  c.system = "not-a-system";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  ScenarioConfig d = ScenarioConfig::preset_config("shear");
  d.ny = -1;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);

  ScenarioConfig f = ScenarioConfig::preset_config("shear");
  f.lp_list = {0.5, 0.5};
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);

  ScenarioConfig e = ScenarioConfig::preset_config("sl-uniform");
  e.v_exprs.clear();
  CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("expression errors carry a position") {
  ScenarioConfig c = ScenarioConfig::preset_config("shear");
  c.omega_expr = "2*y + sin(";
  CHECK_THROWS_AS(initial_vorticity(c), std::invalid_argument);
}

TEST_CASE("initial vorticity is sampled and dealiased") {
  ScenarioConfig c = ScenarioConfig::preset_config("even-x");
  c.nx = 32;
  c.ny = 33;
  const ScalarField2D w = initial_vorticity(c);
  CHECK(w.grid().nx == 32);
  CHECK(w.at(0, 32) == doctest::Approx(2.0 + 0.2 * std::sin(3.14159265358979 + 0.3)).epsilon(1e-6));
  CHECK(tail_energy_fraction(w) < 1e-20);
}

TEST_CASE("a short shear run writes its artifacts and passes") {
  const fs::path out = fresh_dir("shear");
  ScenarioConfig c = ScenarioConfig::preset_config("shear");
  c.t_end = 0.02;
  c.snapshot_steps = 10;
  c.out_dir = out.string();
  const RunReport rep = run_scenario(c);

  CHECK(rep.stop == StopReason::ReachedTEnd);
  CHECK(rep.t_final == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(rep.steps == 20);
  CHECK(rep.all_passed);
  CHECK(rep.exit_status == 0);
  CHECK(fs::exists(out / "series.csv"));
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "snapshots"));

  std::ifstream csv(out / "series.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("t,", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows >= 3);  // initial sample, cadence samples, final sample

  const nlohmann::json body = rep.body;
  CHECK(body.at("stop").at("reason").get<std::string>() == "reached-t-end");
  CHECK(body.at("diagnostics").contains("certifications"));
  CHECK(body.at("exit_status").get<int>() == 0);
  for (const auto& f : rep.files) CHECK(fs::exists(out / f));
}

TEST_CASE("a short semi-lagrangian run reports its projections") {
  const fs::path out = fresh_dir("slwave");
  ScenarioConfig c = ScenarioConfig::preset_config("sl-wave");
  c.t_end = 0.01;
  c.out_dir = out.string();
  const RunReport rep = run_scenario(c);
  CHECK(rep.stop == StopReason::ReachedTEnd);
  CHECK(rep.all_passed);
  const auto& proj = rep.body.at("diagnostics").at("projections");
  CHECK(proj.at("step_mass_shift_max").get<double>() < 1e-6);
  CHECK(proj.contains("compat_flux_shift"));
}

TEST_CASE("log-mean study runs as a scenario") {
  const fs::path out = fresh_dir("logmean");
  ScenarioConfig c;
  c.system = "log-mean-study";
  c.omega_expr = "exp(x)";
  c.nx = 2001;
  c.out_dir = out.string();
  const RunReport rep = run_scenario(c);
  CHECK(rep.all_passed);
  CHECK(rep.body.at("diagnostics").at("nonincreasing").get<bool>());
}

TEST_CASE("identity study smoke: keys, levels, and a clean pass shape") {
  ScenarioConfig c = ScenarioConfig::preset_config("sl-pinned");
  c.nx = 32;
  c.ny = 65;
  c.na = 33;
  c.dt = 2e-3;
  c.t_end = 6e-3;
  const nlohmann::json j = dictionary_study(c, 2);
  CHECK(j.at("levels").size() == 2);
  CHECK(j.at("levels")[1].at("nx").get<int>() == 64);
  CHECK(j.contains("all_passed"));
  for (const char* key : {"ha", "hx", "va", "vx", "v", "stream", "ht", "vt", "pin"}) {
    const auto& id = j.at("identities").at(key);
    CHECK(id.at("residuals").size() == 2);
    CHECK(id.at("orders").size() == 1);
    CHECK(id.contains("pass"));
  }
}
