#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rayleigh/grid.hpp"
#include "rayleigh/interp.hpp"
#include "rayleigh/reduce.hpp"

using namespace rayleigh;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField2D fill(GridPtr g, double (*f)(double, double)) {
  ScalarField2D out(g);
  for (int i = 0; i < g->nx; ++i)
    for (int j = 0; j < g->ny; ++j) out.at(i, j) = f(g->x[i], g->y[j]);
  return out;
}

double max_err(const ScalarField2D& a, double (*f)(double, double)) {
  const ChannelGrid& g = a.grid();
  double e = 0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) e = std::max(e, std::abs(a.at(i, j) - f(g.x[i], g.y[j])));
  return e;
}

}  // namespace

TEST_CASE("grid nodes and trapezoid weights") {
  ChannelGrid g(16, 9);
  CHECK(g.dx == doctest::Approx(1.0 / 16));
  CHECK(g.dy == doctest::Approx(1.0 / 8));
  CHECK(g.x.front() == 0.0);
  CHECK(g.y.front() == 0.0);
  CHECK(g.y.back() == 1.0);
  double wsum = std::accumulate(g.wy.begin(), g.wy.end(), 0.0);
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.wy.front() == doctest::Approx(0.5 * g.dy));
  CHECK(make_grid(12, 9)->max_mode() == 4);
  CHECK(make_grid(12, 9, XDeriv::Fd4)->max_mode() == 6);
  CHECK_THROWS_AS(ChannelGrid(3, 9), std::invalid_argument);
  CHECK_THROWS_AS(ChannelGrid(16, 2), std::invalid_argument);
}

TEST_CASE("integrate_full is exact for trig polynomials times linear profiles") {
  auto g = make_grid(32, 17);
  auto f = fill(g, [](double x, double y) { return (2.0 + std::sin(2 * kPi * x)) * (1 + 3 * y); });
  // rectangle rule kills the x mode exactly; trapezoid is exact on linear y
  CHECK(integrate_full(f) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(integrate_full(f) == integrate_full(f));  // fixed summation order
}

TEST_CASE("integrate_y weight variants") {
  auto g = make_grid(8, 33);
  auto one = fill(g, [](double, double) { return 1.0; });
  CHECK(integrate_y(one, YWeight::One)[3] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_y(one, YWeight::Z)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate_y(one, YWeight::OneMinusZ)[5] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cumint_y anchors exactly and converges at fourth order") {
  auto ref = [](double, double y) { return (1.0 - std::cos(kPi * y)) / kPi; };
  double err[2];
  int idx = 0;
  for (int ny : {33, 65}) {
    auto g = make_grid(8, ny);
    auto f = fill(g, [](double, double y) { return std::sin(kPi * y); });
    auto c = cumint_y(f, YWeight::One, CumFrom::Bottom);
    for (int i = 0; i < g->nx; ++i) CHECK(c.at(i, 0) == 0.0);
    err[idx++] = max_err(c, ref);
  }
  CHECK(err[0] / err[1] > 12.0);  // ~16 expected

  // Bottom and Top are mirror images: their sum is y-independent
  auto g = make_grid(8, 65);
  auto f = fill(g, [](double, double y) { return std::exp(y); });
  auto cb = cumint_y(f, YWeight::One, CumFrom::Bottom);
  auto ct = cumint_y(f, YWeight::One, CumFrom::Top);
  for (int j = 0; j < g->ny; ++j)
    CHECK(cb.at(2, j) + ct.at(2, j) ==
          doctest::Approx(cb.at(2, g->ny - 1)).epsilon(1e-13));
  for (int i = 0; i < g->nx; ++i) CHECK(ct.at(i, g->ny - 1) == 0.0);
}

TEST_CASE("ddx is exact on resolved Fourier modes") {
  auto g = make_grid(32, 9);
  auto f = fill(g, [](double x, double) { return std::sin(2 * kPi * 5 * x); });
  auto d = ddx(f);
  auto exact = [](double x, double) { return 10 * kPi * std::cos(2 * kPi * 5 * x); };
  CHECK(max_err(d, exact) < 1e-10);
}

TEST_CASE("ddx fd4 variant converges at fourth order") {
  double err[2];
  int idx = 0;
  for (int nx : {32, 64}) {
    auto g = make_grid(nx, 9, XDeriv::Fd4);
    auto f = fill(g, [](double x, double) { return std::sin(2 * kPi * x); });
    err[idx++] = max_err(ddx(f), [](double x, double) { return 2 * kPi * std::cos(2 * kPi * x); });
  }
  CHECK(err[0] / err[1] > 14.0);
}

TEST_CASE("ddy converges at fourth order including the walls") {
  double err[2];
  int idx = 0;
  for (int ny : {33, 65}) {
    auto g = make_grid(8, ny);
    auto f = fill(g, [](double, double y) { return std::sin(2.0 * y + 0.3); });
    err[idx++] = max_err(ddy(f), [](double, double y) { return 2.0 * std::cos(2.0 * y + 0.3); });
  }
  CHECK(err[0] / err[1] > 12.0);
}

TEST_CASE("ddx_line matches the field derivative") {
  auto g = make_grid(16, 9);
  std::vector<double> line(16);
  for (int i = 0; i < 16; ++i) line[i] = std::cos(2 * kPi * g->x[i]);
  auto d = ddx_line(*g, line);
  for (int i = 0; i < 16; ++i)
    CHECK(d[i] == doctest::Approx(-2 * kPi * std::sin(2 * kPi * g->x[i])).epsilon(1e-10));
}

TEST_CASE("dealias_x removes the top third of the spectrum") {
  auto g = make_grid(24, 9);  // max_mode 8
  auto f = fill(g, [](double x, double) { return std::sin(2 * kPi * 10 * x); });
  dealias_x(f);
  CHECK(max_abs(f) < 1e-12);
  auto keep = fill(g, [](double x, double) { return std::cos(2 * kPi * 3 * x); });
  auto before = keep;
  dealias_x(keep);
  for (int i = 0; i < 24; ++i) CHECK(keep.at(i, 2) == doctest::Approx(before.at(i, 2)).epsilon(1e-12));
}

TEST_CASE("tail_energy_fraction flags spectral pile-up") {
  auto g = make_grid(48, 9);  // active modes 1..16, tail 12..16
  auto smooth = fill(g, [](double x, double) { return std::sin(2 * kPi * x); });
  CHECK(tail_energy_fraction(smooth) < 1e-20);
  auto rough = fill(g, [](double x, double) { return std::sin(2 * kPi * 14 * x); });
  CHECK(tail_energy_fraction(rough) > 0.9);
}

TEST_CASE("refined_extrema sees peaks between x nodes") {
  const int nx = 64;
  auto g = make_grid(nx, 9);
  const double phase = kPi / nx;  // puts the crest halfway between nodes
  ScalarField2D f(g);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < 9; ++j) f.at(i, j) = 2.0 + std::cos(2 * kPi * g->x[i] - phase);
  const double plain = max_of(f);
  const auto ext = refined_extrema(f);
  CHECK(plain < 3.0 - 1e-4);
  CHECK(ext.max == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(ext.min == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(ext.min_abs == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(ext.max >= plain);
}

TEST_CASE("finiteness guard") {
  auto g = make_grid(8, 9);
  ScalarField2D f(g, 1.0);
  require_finite(f, "f");
  f.at(3, 2) = std::nan("");
  CHECK_THROWS_AS(require_finite(f, "f"), FieldError);
}

TEST_CASE("pairwise_sum is reproducible and accurate") {
  std::vector<double> xs(100000);
  double seed = 0.5;
  long double exact = 0;
  for (auto& x : xs) {
    seed = std::fmod(seed * 997.0 + 0.123456789, 1.0);
    x = seed - 0.5;
    exact += x;
  }
  const double s1 = pairwise_sum(xs);
  const double s2 = pairwise_sum(xs);
  CHECK(s1 == s2);
  CHECK(std::abs(s1 - static_cast<double>(exact)) < 1e-8);
}

TEST_CASE("monotone cubic interpolation and inversion") {
  std::vector<double> t(33), f(33);
  for (int j = 0; j < 33; ++j) {
    t[j] = j / 32.0;
    f[j] = t[j] + 0.3 * t[j] * t[j];
  }
  MonotoneCubic c(t, f);
  for (int j = 0; j < 33; ++j) CHECK(c.eval(t[j]) == doctest::Approx(f[j]).epsilon(1e-14));
  CHECK(c.eval(0.51) == doctest::Approx(0.51 + 0.3 * 0.51 * 0.51).epsilon(1e-4));
  CHECK(c.deriv(0.5) == doctest::Approx(1.0 + 0.6 * 0.5).epsilon(1e-3));

  // interpolant of monotone data stays monotone
  double prev = c.eval(0.0);
  for (int q = 1; q <= 640; ++q) {
    const double cur = c.eval(q / 640.0);
    CHECK(cur >= prev - 1e-14);
    prev = cur;
  }

  const double target = 0.7;
  const double tstar = c.invert(target);
  CHECK(c.eval(tstar) == doctest::Approx(target).epsilon(1e-11));
}
