#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace rayleigh {

// A field (or an input that should be one) contains NaN or Inf.
struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class XDeriv { Spectral, Fd4 };

// Periodic channel, period 1 in x, walls at y = 0 and y = 1.
// x_i = i/nx (rectangle rule), y_j = j/(ny-1) (composite trapezoid).
struct ChannelGrid {
  int nx;
  int ny;
  XDeriv xderiv;
  double dx;
  double dy;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> wy;  // trapezoid weights, sum 1

  ChannelGrid(int nx_, int ny_, XDeriv xd = XDeriv::Spectral);

  // Largest x mode carried by the scheme: floor(nx/3) under the 2/3 rule,
  // nx/2 for the fd4 fallback.
  int max_mode() const;
};

using GridPtr = std::shared_ptr<const ChannelGrid>;
GridPtr make_grid(int nx, int ny, XDeriv xd = XDeriv::Spectral);

// Scalar samples on a ChannelGrid, x-major storage with y varying fastest.
class ScalarField2D {
 public:
  ScalarField2D() = default;
  explicit ScalarField2D(GridPtr g, double fill = 0.0);

  double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * g_->ny + j]; }
  double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * g_->ny + j]; }

  const ChannelGrid& grid() const { return *g_; }
  const GridPtr& grid_ptr() const { return g_; }
  std::span<double> data() { return v_; }
  std::span<const double> data() const { return v_; }
  std::size_t size() const { return v_.size(); }

 private:
  GridPtr g_;
  std::vector<double> v_;
};

bool all_finite(std::span<const double> xs);
bool all_finite(const ScalarField2D& f);
void require_finite(const ScalarField2D& f, const char* what);

// Rectangle rule in x composed with trapezoid in y; fixed summation order.
double integrate_full(const ScalarField2D& f);

enum class YWeight { One, Z, OneMinusZ };

// Per-column integral of w(z) f(x, z) over (0,1). One value per x node.
std::vector<double> integrate_y(const ScalarField2D& f, YWeight w = YWeight::One);

enum class CumFrom { Bottom, Top };

// Running integral of w(z) f(x,z): Bottom gives F(x,y) = int_0^y, Top gives
// F(x,y) = int_y^1. Trapezoid with the Euler-Maclaurin endpoint correction,
// fourth order for smooth integrands and exactly zero at the anchored wall.
ScalarField2D cumint_y(const ScalarField2D& f, YWeight w, CumFrom from);

// x derivative: Fourier differentiation per y row by default, 4th-order
// periodic central differences for the Fd4 scheme.
ScalarField2D ddx(const ScalarField2D& f);

// y derivative: 4th-order central stencils inside, one-sided at the walls.
ScalarField2D ddy(const ScalarField2D& f);

// x derivative of a single periodic line sampled at the grid's x nodes.
std::vector<double> ddx_line(const ChannelGrid& g, std::span<const double> line);

// 2/3-rule truncation of the x spectrum, row by row. No-op on Fd4 grids.
void dealias_x(ScalarField2D& f);

// Fraction of x-spectrum energy (mean mode excluded, y-averaged) carried by
// the top third of the active modes. The resolution-loss signal.
double tail_energy_fraction(const ScalarField2D& f);

double max_abs(const ScalarField2D& f);
double min_of(const ScalarField2D& f);
double max_of(const ScalarField2D& f);

struct FieldExtrema {
  double min = 0;
  double max = 0;
  double min_abs = 0;
};

// Extrema with every y row refined 32x in x by trigonometric interpolation,
// so a sup that sits between grid nodes is not undercounted. The refined
// nodes contain the original ones; on Fd4 grids this is the plain extrema.
FieldExtrema refined_extrema(const ScalarField2D& f);

}  // namespace rayleigh
