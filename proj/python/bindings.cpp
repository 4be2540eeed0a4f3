#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "json.hpp"
#include "rayleigh/diagnostics.hpp"
#include "rayleigh/hydrostatic.hpp"
#include "rayleigh/logmean.hpp"
#include "rayleigh/scenario.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

rayleigh::ScalarField2D field_from(const Array& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected an (nx, ny) array");
  const int nx = static_cast<int>(arr.shape(0));
  const int ny = static_cast<int>(arr.shape(1));
  rayleigh::ScalarField2D f(rayleigh::make_grid(nx, ny));
  std::copy_n(arr.data(), f.size(), f.data().data());
  return f;
}

Array array_from(const rayleigh::ScalarField2D& f) {
  const auto& g = f.grid();
  Array out({static_cast<py::ssize_t>(g.nx), static_cast<py::ssize_t>(g.ny)});
  std::copy_n(f.data().data(), f.size(), out.mutable_data());
  return out;
}

rayleigh::WeightedSamples samples_from(std::vector<double> v, std::vector<double> w) {
  rayleigh::WeightedSamples ws;
  ws.values = std::move(v);
  if (w.empty()) w.assign(ws.values.size(), 1.0 / static_cast<double>(ws.values.size()));
  ws.weights = std::move(w);
  ws.validate();
  return ws;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hydrostatic channel flow and semi-Lagrangian torus flow laboratory";

  m.def(
      "functionals",
      [](const Array& omega) {
        rayleigh::FlowState s(field_from(omega));
        const rayleigh::FunctionalSample fs = rayleigh::functional_sample(s);
        py::dict d;
        d["rayleigh_ok"] = fs.rayleigh_ok;
        d["min_rayleigh"] = fs.min_ray;
        d["max_rayleigh"] = fs.max_ray;
        d["e1"] = fs.e1_a;
        d["e2"] = fs.e2_a;
        d["d1"] = fs.d1;
        d["d2"] = fs.d2;
        d["kinetic"] = fs.kinetic;
        d["u_inf"] = fs.u_inf;
        d["omega_inf"] = fs.omega_inf;
        d["px_l2"] = fs.px_l2;
        d["gauge_dev"] = fs.gauge_dev;
        d["tail_fraction"] = fs.tail_fraction;
        return d;
      },
      py::arg("omega"));

  m.def(
      "constants_json",
      [](const Array& omega) {
        rayleigh::FlowState s(field_from(omega));
        return rayleigh::to_json(rayleigh::paper_constants(s)).dump();
      },
      py::arg("omega"));

  m.def(
      "velocity",
      [](const Array& omega) {
        const rayleigh::ScalarField2D w = field_from(omega);
        return py::make_tuple(array_from(rayleigh::velocity_u(w)),
                              array_from(rayleigh::velocity_v(w)));
      },
      py::arg("omega"));

  m.def(
      "stream",
      [](const Array& omega) { return array_from(rayleigh::stream_function(field_from(omega))); },
      py::arg("omega"));

  m.def(
      "step",
      [](const Array& omega, double dt, int steps, double cfl_max) {
        rayleigh::FlowState s(field_from(omega));
        for (int k = 0; k < steps; ++k) rayleigh::step_rk4(s, dt, cfl_max);
        return array_from(s.omega);
      },
      py::arg("omega"), py::arg("dt"), py::arg("steps") = 1, py::arg("cfl_max") = 0.5);

  m.def(
      "preset_json",
      [](const std::string& name) {
        return rayleigh::ScenarioConfig::preset_config(name).to_json().dump();
      },
      py::arg("name"));

  m.def(
      "run_json",
      [](const std::string& config) {
        auto cfg = rayleigh::ScenarioConfig::from_json(nlohmann::json::parse(config));
        cfg.validate();
        return rayleigh::run_scenario(cfg).body.dump();
      },
      py::arg("config"));

  m.def(
      "dictionary_study_json",
      [](const std::string& config, int levels) {
        auto cfg = rayleigh::ScenarioConfig::from_json(nlohmann::json::parse(config));
        cfg.validate();
        return rayleigh::dictionary_study(cfg, levels).dump();
      },
      py::arg("config"), py::arg("levels") = 3);

  m.def(
      "geometric_mean",
      [](std::vector<double> v, std::vector<double> w) {
        return rayleigh::geometric_mean(samples_from(std::move(v), std::move(w)));
      },
      py::arg("values"), py::arg("weights") = std::vector<double>{});

  m.def(
      "p_norm",
      [](std::vector<double> v, std::vector<double> w, double p) {
        return rayleigh::p_norm(samples_from(std::move(v), std::move(w)), p);
      },
      py::arg("values"), py::arg("weights"), py::arg("p"));
}
