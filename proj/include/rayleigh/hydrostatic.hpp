#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rayleigh/grid.hpp"

namespace rayleigh {

struct CflError : std::runtime_error {
  double admissible_dt;
  CflError(const std::string& msg, double ok_dt) : std::runtime_error(msg), admissible_dt(ok_dt) {}
};

enum class StopReason { ReachedTEnd, RayleighCollapse, ResolutionLoss, NanDetected, CurlDrift };
const char* to_string(StopReason r);

// (1-y) int_0^y z w dz + y int_y^1 (1-z) w dz; zero at both walls.
ScalarField2D stream_function(const ScalarField2D& omega);

// u = int_0^y w dz minus its own y average, which equals
// int_0^1 z w dz - int_y^1 w dz. Evaluated in the first form so the zero
// y-average holds exactly in the quadrature, not just in the limit.
ScalarField2D velocity_u(const ScalarField2D& omega);

// The stream kernel applied to w_x; equals d/dx of the stream function.
ScalarField2D velocity_v(const ScalarField2D& omega);

// P_x(x) = -d/dx int_0^1 u^2 dy. Mean zero over x.
std::vector<double> pressure_gradient(const ScalarField2D& u);

// Vorticity state with the velocity fields reconstructed from it. The
// derived members are refreshed on construction and after each step.
struct FlowState {
  double t = 0.0;
  ScalarField2D omega;
  ScalarField2D stream;
  ScalarField2D u;
  ScalarField2D v;
  std::vector<double> px;

  explicit FlowState(ScalarField2D w0, double t0 = 0.0);
  void refresh();
};

// -(u w_x + v w_y); the advection product is dealiased on spectral grids.
ScalarField2D transport_rhs(const FlowState& s);

double admissible_dt(const FlowState& s, double cfl_max = 0.5);

// Classical RK4 step; throws CflError when
// u_max*dt*nx + v_max*dt*(ny-1) > cfl_max.
void step_rk4(FlowState& s, double dt, double cfl_max = 0.5);

}  // namespace rayleigh
