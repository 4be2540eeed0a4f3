#include "rayleigh/torus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rayleigh/fft.hpp"
#include "rayleigh/grid.hpp"
#include "rayleigh/reduce.hpp"

namespace rayleigh {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TorusField::TorusField(int d_, int n0_, int n1_, int na_, int ncomp_, double fill)
    : d(d_), n0(n0_), n1(d_ == 2 ? n1_ : 1), na(na_), ncomp(ncomp_) {
  if (d != 1 && d != 2) throw std::invalid_argument("TorusField: d must be 1 or 2");
  if (n0 < 8 || (d == 2 && n1 < 8)) throw std::invalid_argument("TorusField: spatial size too small");
  if (na < 1) throw std::invalid_argument("TorusField: na must be >= 1");
  v.assign(static_cast<std::size_t>(ncomp) * nsp() * na, fill);
}

std::vector<double> label_nodes(int na) {
  if (na == 1) return {0.0};
  std::vector<double> a(na);
  for (int m = 0; m < na; ++m) a[m] = static_cast<double>(m) / (na - 1);
  a.back() = 1.0;
  return a;
}

std::vector<double> label_weights(int na) {
  if (na == 1) return {1.0};
  const double da = 1.0 / (na - 1);
  std::vector<double> w(na, da);
  w.front() = 0.5 * da;
  w.back() = 0.5 * da;
  return w;
}

bool all_finite(const TorusField& f) { return all_finite(std::span<const double>(f.v)); }

void require_finite(const TorusField& f, const char* what) {
  if (!all_finite(f)) throw FieldError(std::string("non-finite field: ") + what);
}

namespace {

// Applies one spectral 1D pass along the chosen spatial axis for every
// (component, other-axis, label) line.
void spectral_pass(TorusField& f, int axis, bool derivative, int cut) {
  const int n = axis == 0 ? f.n0 : f.n1;
  const int nother = axis == 0 ? f.n1 : f.n0;
  const std::size_t nlines = static_cast<std::size_t>(f.ncomp) * nother * f.na;
  parallel_for(nlines, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> line(n);
    std::vector<std::complex<double>> spec(n / 2 + 1);
    for (std::size_t L = lo; L < hi; ++L) {
      const int c = static_cast<int>(L / (static_cast<std::size_t>(nother) * f.na));
      const std::size_t rem = L % (static_cast<std::size_t>(nother) * f.na);
      const int other = static_cast<int>(rem / f.na);
      const int m = static_cast<int>(rem % f.na);
      for (int i = 0; i < n; ++i) {
        const int s = axis == 0 ? i * f.n1 + other : other * f.n1 + i;
        line[i] = f.at(c, s, m);
      }
      fft::forward(line, spec);
      if (derivative) {
        for (int q = 0; q <= n / 2; ++q) spec[q] *= std::complex<double>(0.0, kTwoPi * q);
        if (n % 2 == 0) spec[n / 2] = 0.0;
      }
      if (cut >= 0)
        for (int q = cut + 1; q <= n / 2; ++q) spec[q] = 0.0;
      fft::inverse(spec, line);
      for (int i = 0; i < n; ++i) {
        const int s = axis == 0 ? i * f.n1 + other : other * f.n1 + i;
        f.at(c, s, m) = line[i];
      }
    }
  });
}

}  // namespace

TorusField ddx_axis(const TorusField& f, int axis) {
  require_finite(f, "ddx_axis");
  if (axis < 0 || axis >= f.d) throw std::invalid_argument("ddx_axis: axis out of range");
  TorusField out = f;
  spectral_pass(out, axis, true, -1);
  return out;
}

void dealias_torus(TorusField& f) {
  require_finite(f, "dealias_torus");
  spectral_pass(f, 0, false, f.n0 / 3);
  if (f.d == 2) spectral_pass(f, 1, false, f.n1 / 3);
}

TorusField poisson_inverse_torus(const TorusField& g, double* mean_removed) {
  require_finite(g, "poisson_inverse_torus");
  if (g.ncomp != 1 || g.na != 1)
    throw std::invalid_argument("poisson_inverse_torus: expects a spatial-only scalar");
  TorusField p = g;
  if (g.d == 1) {
    const int n = g.n0;
    std::vector<std::complex<double>> spec(n / 2 + 1);
    fft::forward(std::span<const double>(g.v), spec);
    if (mean_removed) *mean_removed = std::abs(spec[0]) / n;
    spec[0] = 0.0;
    for (int m = 1; m <= n / 2; ++m) spec[m] /= kTwoPi * kTwoPi * m * m;
    fft::inverse(spec, p.v);
    return p;
  }
  const int n0 = g.n0, n1 = g.n1;
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
  fft::forward2(g.v.data(), spec.data(), n0, n1);
  if (mean_removed) *mean_removed = std::abs(spec[0]) / (static_cast<double>(n0) * n1);
  const int nb1 = n1 / 2 + 1;
  for (int q0 = 0; q0 < n0; ++q0) {
    const int f0 = q0 <= n0 / 2 ? q0 : q0 - n0;
    for (int q1 = 0; q1 < nb1; ++q1) {
      auto& c = spec[static_cast<std::size_t>(q0) * nb1 + q1];
      const double k2 = kTwoPi * kTwoPi * (static_cast<double>(f0) * f0 + static_cast<double>(q1) * q1);
      c = k2 > 0.0 ? c / k2 : 0.0;
    }
  }
  fft::inverse2(spec.data(), p.v.data(), n0, n1);
  return p;
}

double integrate_xa(const TorusField& f, int comp) {
  require_finite(f, "integrate_xa");
  const auto wa = label_weights(f.na);
  const int nsp = f.nsp();
  std::vector<double> per_node(nsp);
  parallel_for(nsp, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      double acc = 0.0;
      for (int m = 0; m < f.na; ++m) acc += wa[m] * f.at(comp, static_cast<int>(s), m);
      per_node[s] = acc;
    }
  });
  return pairwise_sum(per_node) / nsp;
}

double integrate_x(const TorusField& f, int comp, int m) {
  require_finite(f, "integrate_x");
  const int nsp = f.nsp();
  std::vector<double> vals(nsp);
  for (int s = 0; s < nsp; ++s) vals[s] = f.at(comp, s, m);
  return pairwise_sum(vals) / nsp;
}

std::vector<double> integrate_a(const TorusField& f, int comp) {
  require_finite(f, "integrate_a");
  const auto wa = label_weights(f.na);
  const int nsp = f.nsp();
  std::vector<double> out(nsp);
  parallel_for(nsp, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      double acc = 0.0;
      for (int m = 0; m < f.na; ++m) acc += wa[m] * f.at(comp, static_cast<int>(s), m);
      out[s] = acc;
    }
  });
  return out;
}

}  // namespace rayleigh
