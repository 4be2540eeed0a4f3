#include "rayleigh/hydrostatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rayleigh/reduce.hpp"

namespace rayleigh {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::ReachedTEnd: return "reached-t-end";
    case StopReason::RayleighCollapse: return "rayleigh-collapse";
    case StopReason::ResolutionLoss: return "resolution-loss";
    case StopReason::NanDetected: return "nan-detected";
    default: return "curl-drift";
  }
}

namespace {

// (1-y) int_0^y z f dz + y int_y^1 (1-z) f dz
ScalarField2D stream_kernel(const ScalarField2D& f) {
  const auto& g = f.grid();
  ScalarField2D lowpart = cumint_y(f, YWeight::Z, CumFrom::Bottom);
  ScalarField2D uppart = cumint_y(f, YWeight::OneMinusZ, CumFrom::Top);
  ScalarField2D out(f.grid_ptr());
  parallel_for(f.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const int j = static_cast<int>(idx % g.ny);
      const double y = g.y[j];
      out.data()[idx] = (1.0 - y) * lowpart.data()[idx] + y * uppart.data()[idx];
    }
  });
  return out;
}

}  // namespace

ScalarField2D stream_function(const ScalarField2D& omega) { return stream_kernel(omega); }

ScalarField2D velocity_u(const ScalarField2D& omega) {
  const auto& g = omega.grid();
  ScalarField2D below = cumint_y(omega, YWeight::One, CumFrom::Bottom);
  ScalarField2D out(omega.grid_ptr());
  const double corr = g.dy * g.dy / 12.0;
  parallel_for(g.nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const int ii = static_cast<int>(i);
      // Endpoint-corrected mean; the integrand's derivative is omega itself.
      double mean = -corr * (omega.at(ii, g.ny - 1) - omega.at(ii, 0));
      for (int j = 0; j < g.ny; ++j) mean += g.wy[j] * below.at(ii, j);
      for (int j = 0; j < g.ny; ++j) out.at(ii, j) = below.at(ii, j) - mean;
    }
  });
  return out;
}

ScalarField2D velocity_v(const ScalarField2D& omega) { return stream_kernel(ddx(omega)); }

std::vector<double> pressure_gradient(const ScalarField2D& u) {
  const auto& g = u.grid();
  std::vector<double> q(g.nx);
  parallel_for(g.nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (int j = 0; j < g.ny; ++j) {
        const double uv = u.at(static_cast<int>(i), j);
        acc += g.wy[j] * uv * uv;
      }
      q[i] = acc;
    }
  });
  std::vector<double> px = ddx_line(g, q);
  for (double& v : px) v = -v;
  return px;
}

FlowState::FlowState(ScalarField2D w0, double t0) : t(t0), omega(std::move(w0)) { refresh(); }

void FlowState::refresh() {
  stream = stream_function(omega);
  u = velocity_u(omega);
  v = velocity_v(omega);
  px = pressure_gradient(u);
}

namespace {

ScalarField2D rhs_of(const ScalarField2D& omega_stage) {
  const auto& g = omega_stage.grid();
  ScalarField2D wx = ddx(omega_stage);
  ScalarField2D wy = ddy(omega_stage);
  ScalarField2D us = velocity_u(omega_stage);
  ScalarField2D vs = velocity_v(omega_stage);
  ScalarField2D adv(omega_stage.grid_ptr());
  parallel_for(adv.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx)
      adv.data()[idx] = us.data()[idx] * wx.data()[idx] + vs.data()[idx] * wy.data()[idx];
  });
  if (g.xderiv == XDeriv::Spectral) dealias_x(adv);
  for (double& x : adv.data()) x = -x;
  return adv;
}

}  // namespace

ScalarField2D transport_rhs(const FlowState& s) { return rhs_of(s.omega); }

double admissible_dt(const FlowState& s, double cfl_max) {
  const auto& g = s.omega.grid();
  const double speed = max_abs(s.u) * g.nx + max_abs(s.v) * (g.ny - 1);
  return speed > 0.0 ? cfl_max / speed : std::numeric_limits<double>::infinity();
}

void step_rk4(FlowState& s, double dt, double cfl_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const double dt_ok = admissible_dt(s, cfl_max);
  if (dt > dt_ok) throw CflError("step_rk4: CFL number exceeds limit", dt_ok);

  const std::size_t n = s.omega.size();
  auto axpy = [&](const ScalarField2D& base, double c, const ScalarField2D& k) {
    ScalarField2D out(base.grid_ptr());
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t idx = lo; idx < hi; ++idx)
        out.data()[idx] = base.data()[idx] + c * k.data()[idx];
    });
    return out;
  };

  ScalarField2D k1 = rhs_of(s.omega);
  ScalarField2D k2 = rhs_of(axpy(s.omega, 0.5 * dt, k1));
  ScalarField2D k3 = rhs_of(axpy(s.omega, 0.5 * dt, k2));
  ScalarField2D k4 = rhs_of(axpy(s.omega, dt, k3));
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx)
      s.omega.data()[idx] += dt / 6.0 *
                             (k1.data()[idx] + 2.0 * k2.data()[idx] + 2.0 * k3.data()[idx] +
                              k4.data()[idx]);
  });
  s.t += dt;
  s.refresh();
}

}  // namespace rayleigh
