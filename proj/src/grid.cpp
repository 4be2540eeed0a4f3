#include "rayleigh/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rayleigh/fft.hpp"
#include "rayleigh/reduce.hpp"

namespace rayleigh {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double yweight(YWeight w, double z) {
  switch (w) {
    case YWeight::One: return 1.0;
    case YWeight::Z: return z;
    default: return 1.0 - z;
  }
}
}  // namespace

ChannelGrid::ChannelGrid(int nx_, int ny_, XDeriv xd) : nx(nx_), ny(ny_), xderiv(xd) {
  if (nx < 8) throw std::invalid_argument("ChannelGrid: nx must be >= 8");
  if (ny < 9) throw std::invalid_argument("ChannelGrid: ny must be >= 9");
  dx = 1.0 / nx;
  dy = 1.0 / (ny - 1);
  x.resize(nx);
  for (int i = 0; i < nx; ++i) x[i] = static_cast<double>(i) / nx;
  y.resize(ny);
  for (int j = 0; j < ny; ++j) y[j] = static_cast<double>(j) / (ny - 1);
  y.front() = 0.0;
  y.back() = 1.0;
  wy.assign(ny, dy);
  wy.front() = 0.5 * dy;
  wy.back() = 0.5 * dy;
}

int ChannelGrid::max_mode() const { return xderiv == XDeriv::Spectral ? nx / 3 : nx / 2; }

GridPtr make_grid(int nx, int ny, XDeriv xd) { return std::make_shared<const ChannelGrid>(nx, ny, xd); }

ScalarField2D::ScalarField2D(GridPtr g, double fill)
    : g_(std::move(g)), v_(static_cast<std::size_t>(g_->nx) * g_->ny, fill) {}

bool all_finite(std::span<const double> xs) {
  for (double v : xs)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const ScalarField2D& f) { return all_finite(f.data()); }

void require_finite(const ScalarField2D& f, const char* what) {
  if (!all_finite(f)) throw FieldError(std::string("non-finite field: ") + what);
}

double integrate_full(const ScalarField2D& f) {
  require_finite(f, "integrate_full");
  const auto& g = f.grid();
  std::vector<double> colsum(g.nx);
  parallel_for(g.nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (int j = 0; j < g.ny; ++j) acc += g.wy[j] * f.at(static_cast<int>(i), j);
      colsum[i] = acc;
    }
  });
  return pairwise_sum(colsum) * g.dx;
}

std::vector<double> integrate_y(const ScalarField2D& f, YWeight w) {
  require_finite(f, "integrate_y");
  const auto& g = f.grid();
  std::vector<double> out(g.nx);
  parallel_for(g.nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (int j = 0; j < g.ny; ++j) acc += g.wy[j] * yweight(w, g.y[j]) * f.at(static_cast<int>(i), j);
      out[i] = acc;
    }
  });
  return out;
}

namespace {

// Fourth-order first derivative of one column, same stencils as ddy.
void column_deriv(std::span<const double> f, std::span<double> d, double dy) {
  const int n = static_cast<int>(f.size());
  const double s = 1.0 / (12.0 * dy);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
  for (int j = 2; j < n - 2; ++j)
    d[j] = (-f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]) * s;
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s;
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] +
              3.0 * f[n - 5]) * s;
}

}  // namespace

ScalarField2D cumint_y(const ScalarField2D& f, YWeight w, CumFrom from) {
  require_finite(f, "cumint_y");
  const auto& g = f.grid();
  ScalarField2D out(f.grid_ptr());
  const double corr = g.dy * g.dy / 12.0;
  parallel_for(g.nx, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> col(g.ny), der(g.ny);
    for (std::size_t ii = lo; ii < hi; ++ii) {
      const int i = static_cast<int>(ii);
      for (int j = 0; j < g.ny; ++j) col[j] = yweight(w, g.y[j]) * f.at(i, j);
      column_deriv(col, der, g.dy);
      // Running trapezoid with the Euler-Maclaurin endpoint correction,
      // fourth order for smooth integrands, zero at the anchored wall.
      if (from == CumFrom::Bottom) {
        out.at(i, 0) = 0.0;
        double acc = 0.0;
        for (int j = 1; j < g.ny; ++j) {
          acc += 0.5 * g.dy * (col[j - 1] + col[j]);
          out.at(i, j) = acc - corr * (der[j] - der[0]);
        }
      } else {
        out.at(i, g.ny - 1) = 0.0;
        double acc = 0.0;
        for (int j = g.ny - 2; j >= 0; --j) {
          acc += 0.5 * g.dy * (col[j] + col[j + 1]);
          out.at(i, j) = acc - corr * (der[g.ny - 1] - der[j]);
        }
      }
    }
  });
  return out;
}

namespace {

void spectral_ddx_rows(const ScalarField2D& f, ScalarField2D& out) {
  const auto& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  parallel_for(ny, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> line(nx), dline(nx);
    std::vector<std::complex<double>> spec(nx / 2 + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      for (int i = 0; i < nx; ++i) line[i] = f.at(i, static_cast<int>(j));
      fft::forward(line, spec);
      for (int m = 0; m <= nx / 2; ++m) {
        const double k = kTwoPi * m;
        spec[m] *= std::complex<double>(0.0, k);
      }
      if (nx % 2 == 0) spec[nx / 2] = 0.0;
      fft::inverse(spec, dline);
      for (int i = 0; i < nx; ++i) out.at(i, static_cast<int>(j)) = dline[i];
    }
  });
}

void fd4_ddx(const ScalarField2D& f, ScalarField2D& out) {
  const auto& g = f.grid();
  const int nx = g.nx, ny = g.ny;
  const double s = 1.0 / (12.0 * g.dx);
  parallel_for(nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ii = lo; ii < hi; ++ii) {
      const int i = static_cast<int>(ii);
      const int im1 = (i + nx - 1) % nx, im2 = (i + nx - 2) % nx;
      const int ip1 = (i + 1) % nx, ip2 = (i + 2) % nx;
      for (int j = 0; j < ny; ++j) {
        out.at(i, j) =
            s * (8.0 * (f.at(ip1, j) - f.at(im1, j)) - (f.at(ip2, j) - f.at(im2, j)));
      }
    }
  });
}

}  // namespace

ScalarField2D ddx(const ScalarField2D& f) {
  require_finite(f, "ddx");
  ScalarField2D out(f.grid_ptr());
  if (f.grid().xderiv == XDeriv::Spectral)
    spectral_ddx_rows(f, out);
  else
    fd4_ddx(f, out);
  return out;
}

ScalarField2D ddy(const ScalarField2D& f) {
  require_finite(f, "ddy");
  const auto& g = f.grid();
  const int ny = g.ny;
  const double s = 1.0 / (12.0 * g.dy);
  ScalarField2D out(f.grid_ptr());
  parallel_for(g.nx, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ii = lo; ii < hi; ++ii) {
      const int i = static_cast<int>(ii);
      out.at(i, 0) = s * (-25.0 * f.at(i, 0) + 48.0 * f.at(i, 1) - 36.0 * f.at(i, 2) +
                          16.0 * f.at(i, 3) - 3.0 * f.at(i, 4));
      out.at(i, 1) = s * (-3.0 * f.at(i, 0) - 10.0 * f.at(i, 1) + 18.0 * f.at(i, 2) -
                          6.0 * f.at(i, 3) + f.at(i, 4));
      for (int j = 2; j < ny - 2; ++j) {
        out.at(i, j) =
            s * (8.0 * (f.at(i, j + 1) - f.at(i, j - 1)) - (f.at(i, j + 2) - f.at(i, j - 2)));
      }
      out.at(i, ny - 2) = -s * (-3.0 * f.at(i, ny - 1) - 10.0 * f.at(i, ny - 2) +
                                18.0 * f.at(i, ny - 3) - 6.0 * f.at(i, ny - 4) + f.at(i, ny - 5));
      out.at(i, ny - 1) = -s * (-25.0 * f.at(i, ny - 1) + 48.0 * f.at(i, ny - 2) -
                                36.0 * f.at(i, ny - 3) + 16.0 * f.at(i, ny - 4) - 3.0 * f.at(i, ny - 5));
    }
  });
  return out;
}

std::vector<double> ddx_line(const ChannelGrid& g, std::span<const double> line) {
  if (!all_finite(line)) throw FieldError("non-finite field: ddx_line");
  const int nx = g.nx;
  std::vector<double> out(nx);
  if (g.xderiv == XDeriv::Spectral) {
    std::vector<std::complex<double>> spec(nx / 2 + 1);
    fft::forward(line, spec);
    for (int m = 0; m <= nx / 2; ++m) spec[m] *= std::complex<double>(0.0, kTwoPi * m);
    if (nx % 2 == 0) spec[nx / 2] = 0.0;
    fft::inverse(spec, out);
  } else {
    const double s = 1.0 / (12.0 * g.dx);
    for (int i = 0; i < nx; ++i) {
      const int im1 = (i + nx - 1) % nx, im2 = (i + nx - 2) % nx;
      const int ip1 = (i + 1) % nx, ip2 = (i + 2) % nx;
      out[i] = s * (8.0 * (line[ip1] - line[im1]) - (line[ip2] - line[im2]));
    }
  }
  return out;
}

void dealias_x(ScalarField2D& f) {
  const auto& g = f.grid();
  if (g.xderiv != XDeriv::Spectral) return;
  const int nx = g.nx, cut = g.max_mode();
  if (cut >= nx / 2) return;
  parallel_for(g.ny, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> line(nx);
    std::vector<std::complex<double>> spec(nx / 2 + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      for (int i = 0; i < nx; ++i) line[i] = f.at(i, static_cast<int>(j));
      fft::forward(line, spec);
      for (int m = cut + 1; m <= nx / 2; ++m) spec[m] = 0.0;
      fft::inverse(spec, line);
      for (int i = 0; i < nx; ++i) f.at(i, static_cast<int>(j)) = line[i];
    }
  });
}

double tail_energy_fraction(const ScalarField2D& f) {
  require_finite(f, "tail_energy_fraction");
  const auto& g = f.grid();
  const int nx = g.nx;
  const int kmax = g.max_mode();
  const int klo = (2 * kmax) / 3 + 1;
  std::vector<double> line(nx);
  std::vector<std::complex<double>> spec(nx / 2 + 1);
  double tail = 0.0, total = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < nx; ++i) line[i] = f.at(i, j);
    fft::forward(line, spec);
    for (int m = 1; m <= kmax; ++m) {
      const double e = g.wy[j] * std::norm(spec[m]);
      total += e;
      if (m >= klo) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

double max_abs(const ScalarField2D& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

double min_of(const ScalarField2D& f) {
  double m = f.data()[0];
  for (double v : f.data()) m = std::min(m, v);
  return m;
}

double max_of(const ScalarField2D& f) {
  double m = f.data()[0];
  for (double v : f.data()) m = std::max(m, v);
  return m;
}

FieldExtrema refined_extrema(const ScalarField2D& f) {
  const auto& g = f.grid();
  FieldExtrema e{f.data()[0], f.data()[0], std::abs(f.data()[0])};
  auto scan = [&e](std::span<const double> vals) {
    for (double v : vals) {
      e.min = std::min(e.min, v);
      e.max = std::max(e.max, v);
      e.min_abs = std::min(e.min_abs, std::abs(v));
    }
  };
  if (g.xderiv != XDeriv::Spectral || g.nx < 4) {
    scan(f.data());
    return e;
  }

  constexpr int kRefine = 32;
  const int nx = g.nx, big = kRefine * nx;
  std::vector<double> line(nx), fine(big);
  std::vector<std::complex<double>> spec(nx / 2 + 1), pad(big / 2 + 1);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < nx; ++i) line[i] = f.at(i, j);
    fft::forward(line, spec);
    std::fill(pad.begin(), pad.end(), std::complex<double>(0.0, 0.0));
    for (int m = 0; m < nx / 2; ++m) pad[m] = spec[m] * static_cast<double>(kRefine);
    if (nx % 2 == 0)
      pad[nx / 2] = spec[nx / 2] * (0.5 * kRefine);  // Nyquist splits across +-k
    else
      pad[nx / 2] = spec[nx / 2] * static_cast<double>(kRefine);
    fft::inverse(pad, fine);
    scan(fine);
  }
  return e;
}

}  // namespace rayleigh
