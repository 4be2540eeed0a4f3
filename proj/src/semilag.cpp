#include "rayleigh/semilag.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rayleigh/fft.hpp"
#include "rayleigh/grid.hpp"
#include "rayleigh/interp.hpp"
#include "rayleigh/logmean.hpp"
#include "rayleigh/reduce.hpp"

namespace rayleigh {

namespace {

// 2nd-order derivative along the label axis of one a-fastest plane.
void deriv_a_plane(const double* f, int na, double da, double* out) {
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * da);
  for (int m = 1; m + 1 < na; ++m) out[m] = (f[m + 1] - f[m - 1]) / (2.0 * da);
  out[na - 1] = (3.0 * f[na - 1] - 4.0 * f[na - 2] + f[na - 3]) / (2.0 * da);
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

std::span<const double> column(const ScalarField2D& f, int i) {
  const auto& g = f.grid();
  return {f.data().data() + static_cast<std::size_t>(i) * g.ny, static_cast<std::size_t>(g.ny)};
}

}  // namespace

SemiLagrangianState::SemiLagrangianState(int d_, TorusField v_, TorusField ha_, double k_,
                                         double t0)
    : d(d_), t(t0), k(k_), v(std::move(v_)), ha(std::move(ha_)) {
  if (v.d != d || ha.d != d || v.ncomp != d || ha.ncomp != 1)
    throw FieldError("semi-lagrangian state: component mismatch");
  if (v.n0 != ha.n0 || v.n1 != ha.n1 || v.na != ha.na)
    throw FieldError("semi-lagrangian state: grid mismatch");
  if (v.na < 3) throw FieldError("semi-lagrangian state: need at least 3 label nodes");
}

SlExtract sl_from_vorticity(const FlowState& s, double k, int na) {
  const auto& g = s.omega.grid();
  if (na < 3) throw FieldError("level-set extraction: need at least 3 label nodes");

  for (int i = 0; i < g.nx; ++i) {
    const auto w = column(s.omega, i);
    if (std::abs(w[0] - k) > 1e-8 || std::abs(w[g.ny - 1] - (k + 1.0)) > 1e-8)
      throw FieldError("level-set extraction: boundary vorticity not pinned to k, k+1");
    for (int j = 0; j + 1 < g.ny; ++j)
      if (!(w[j + 1] > w[j]))
        throw FieldError("level-set extraction: vorticity column not increasing");
  }

  SlExtract out;
  out.map.nx = g.nx;
  out.map.na = na;
  out.map.h.assign(static_cast<std::size_t>(g.nx) * na, 0.0);
  out.v = TorusField(1, g.nx, 1, na, 1);
  out.ha = TorusField(1, g.nx, 1, na, 1);
  const double da = 1.0 / (na - 1);

  parallel_for(static_cast<std::size_t>(g.nx), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const int ii = static_cast<int>(i);
      MonotoneCubic cw(g.y, column(s.omega, ii));
      MonotoneCubic cu(g.y, column(s.u, ii));
      double* hcol = out.map.h.data() + i * na;
      for (int m = 0; m < na; ++m) {
        const double h = cw.invert(k + m * da);
        hcol[m] = h;
        out.v.at(0, ii, m) = cu.eval(h);
      }
      deriv_a_plane(hcol, na, da, &out.ha.at(0, ii, 0));
    }
  });
  return out;
}

nlohmann::json dictionary_residuals(const FlowState& before, const FlowState& mid,
                                    const FlowState& after, double k, int na) {
  const auto& g = mid.omega.grid();
  const double dtc = 0.5 * (after.t - before.t);
  if (!(dtc > 0)) throw FieldError("dictionary residuals: states must straddle in time");

  SlExtract eb = sl_from_vorticity(before, k, na);
  SlExtract em = sl_from_vorticity(mid, k, na);
  SlExtract ea = sl_from_vorticity(after, k, na);

  ScalarField2D wx = ddx(mid.omega);
  ScalarField2D ux = ddx(mid.u);
  ScalarField2D wy = ddy(mid.omega);
  ScalarField2D drive(mid.omega.grid_ptr());  // u (w wx/wy - ux)
  ScalarField2D slope(mid.omega.grid_ptr());  // ux - w wx/wy
  for (std::size_t idx = 0; idx < drive.size(); ++idx) {
    const double core = mid.omega.data()[idx] * wx.data()[idx] / wy.data()[idx];
    slope.data()[idx] = ux.data()[idx] - core;
    drive.data()[idx] = -mid.u.data()[idx] * slope.data()[idx];
  }

  const int nx = g.nx;
  const double da = 1.0 / (na - 1);

  ScalarField2D stx = ddx(mid.stream);
  ScalarField2D sty = ddy(mid.stream);

  TorusField hmap(1, nx, 1, na, 1);
  hmap.v = em.map.h;
  std::vector<double> rhs_hx(hmap.v.size()), rhs_vx(hmap.v.size()), rhs_vt(hmap.v.size());
  std::vector<double> stx_h(hmap.v.size()), sty_h(hmap.v.size());

  double r_ha = 0, r_va = 0, r_v = 0, r_stream = 0, r_pin = 0;
  std::vector<double> pre_h(na), pre_h2(na);
  for (int i = 0; i < nx; ++i) {
    MonotoneCubic cw(g.y, column(mid.omega, i));
    MonotoneCubic cwx(g.y, column(wx, i));
    MonotoneCubic cslope(g.y, column(slope, i));
    MonotoneCubic cdrive(g.y, column(drive, i));
    MonotoneCubic cst(g.y, column(mid.stream, i));
    MonotoneCubic cstx(g.y, column(stx, i));
    MonotoneCubic csty(g.y, column(sty, i));

    const double* hcol = em.map.h.data() + static_cast<std::size_t>(i) * na;
    // running trapezoids of h and h^2 in the label
    pre_h[0] = 0.0;
    pre_h2[0] = 0.0;
    for (int m = 1; m < na; ++m) {
      pre_h[m] = pre_h[m - 1] + 0.5 * da * (hcol[m - 1] + hcol[m]);
      pre_h2[m] = pre_h2[m - 1] + 0.5 * da * (hcol[m - 1] * hcol[m - 1] + hcol[m] * hcol[m]);
    }
    const double full_h = pre_h[na - 1], full_h2 = pre_h2[na - 1];

    for (int m = 0; m < na; ++m) {
      const double a = m * da;
      const double h = hcol[m];
      const double hav = em.ha.at(0, i, m);
      const double vv = em.v.at(0, i, m);
      const double wyh = cw.deriv(h);

      r_ha = std::max(r_ha, std::abs(hav - 1.0 / wyh));
      rhs_hx[hmap.plane(0, i) + m] = -cwx.eval(h) / wyh;
      rhs_vx[hmap.plane(0, i) + m] = cslope.eval(h);
      rhs_vt[hmap.plane(0, i) + m] = cdrive.eval(h) - mid.px[i];
      stx_h[hmap.plane(0, i) + m] = cstx.eval(h);
      sty_h[hmap.plane(0, i) + m] = csty.eval(h);

      // v_a = (k + a) h_a in the integrated form anchored at a = 0, where h = 0
      const double v0 = em.v.at(0, i, 0);
      r_va = std::max(r_va, std::abs(vv - v0 - (k + a) * h + pre_h[m]));

      const double v_closed =
          -(k + 1.0) / 2.0 + (k + a) * h - 0.5 * full_h2 + (full_h - pre_h[m]);
      r_v = std::max(r_v, std::abs(vv - v_closed));

      const double stream_closed = -vv * h + 0.5 * (k + a) * h * h - 0.5 * pre_h2[m];
      r_stream = std::max(r_stream, std::abs(cst.eval(h) - stream_closed));
    }
    r_pin = std::max({r_pin, std::abs(hcol[0]), std::abs(hcol[na - 1] - 1.0)});
  }

  TorusField hx = ddx_axis(hmap, 0);
  TorusField vmid = em.v;
  TorusField vx = ddx_axis(vmid, 0);

  double r_hx = 0, r_vx = 0, r_ht = 0, r_vt = 0;
  for (int i = 0; i < nx; ++i)
    for (int m = 0; m < na; ++m) {
      const std::size_t p = hmap.plane(0, i) + m;
      r_hx = std::max(r_hx, std::abs(hx.v[p] - rhs_hx[p]));
      r_vx = std::max(r_vx, std::abs(vx.v[p] - rhs_vx[p]));
      const double ht = (ea.map.h[p] - eb.map.h[p]) / (2.0 * dtc);
      // d/dt of h at fixed (x, a) equals the x-derivative of the stream function
      // composed with the graph, expanded by the chain rule
      r_ht = std::max(r_ht, std::abs(ht - stx_h[p] - sty_h[p] * rhs_hx[p]));
      const double vt = (ea.v.v[p] - eb.v.v[p]) / (2.0 * dtc);
      r_vt = std::max(r_vt, std::abs(vt - rhs_vt[p]));
    }

  nlohmann::json j;
  j["ha"] = r_ha;
  j["hx"] = r_hx;
  j["va"] = r_va;
  j["vx"] = r_vx;
  j["v"] = r_v;
  j["stream"] = r_stream;
  j["ht"] = r_ht;
  j["vt"] = r_vt;
  j["pin"] = r_pin;
  return j;
}

HsleDerivative hsle_rhs(const SemiLagrangianState& s) {
  const TorusField& v = s.v;
  const TorusField& ha = s.ha;
  const int d = s.d, na = v.na, nsp = v.nsp();

  HsleDerivative out;
  out.dv = TorusField(d, v.n0, v.n1, na, d);
  out.dha = TorusField(d, v.n0, v.n1, na, 1);

  TorusField head(d, v.n0, v.n1, na, 1);
  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) {
      double acc = 0.0;
      for (int c = 0; c < d; ++c) {
        const double z = v.at(c, sp, m);
        acc += z * z;
      }
      head.at(0, sp, m) = 0.5 * acc;
    }
  dealias_torus(head);

  TorusField source(d, v.n0, v.n1, 1, 1);
  TorusField prod(d, v.n0, v.n1, na, 1);
  for (int j = 0; j < d; ++j)
    for (int l = j; l < d; ++l) {
      for (int sp = 0; sp < nsp; ++sp)
        for (int m = 0; m < na; ++m)
          prod.at(0, sp, m) = v.at(j, sp, m) * v.at(l, sp, m) * ha.at(0, sp, m);
      dealias_torus(prod);
      TorusField t(d, v.n0, v.n1, 1, 1);
      t.v = integrate_a(prod, 0);
      TorusField dd = ddx_axis(ddx_axis(t, j), l);
      const double wgt = (j == l) ? 1.0 : 2.0;
      for (int sp = 0; sp < nsp; ++sp) source.v[sp] += wgt * dd.v[sp];
    }
  out.pressure = poisson_inverse_torus(source, &out.pressure_mean);

  for (int c = 0; c < d; ++c) {
    TorusField gb = ddx_axis(head, c);
    TorusField gp = ddx_axis(out.pressure, c);
    for (int sp = 0; sp < nsp; ++sp)
      for (int m = 0; m < na; ++m)
        out.dv.at(c, sp, m) = -gb.at(0, sp, m) - gp.at(0, sp, 0);
  }

  for (int j = 0; j < d; ++j) {
    for (int sp = 0; sp < nsp; ++sp)
      for (int m = 0; m < na; ++m) prod.at(0, sp, m) = v.at(j, sp, m) * ha.at(0, sp, m);
    dealias_torus(prod);
    TorusField gf = ddx_axis(prod, j);
    for (std::size_t idx = 0; idx < out.dha.v.size(); ++idx) out.dha.v[idx] -= gf.v[idx];
  }
  return out;
}

double admissible_dt_sl(const SemiLagrangianState& s, double cfl_max) {
  double denom = 0.0;
  for (int c = 0; c < s.d; ++c) {
    double vmax = 0.0;
    const std::size_t lo = s.v.plane(c, 0);
    const std::size_t hi = lo + static_cast<std::size_t>(s.v.nsp()) * s.v.na;
    for (std::size_t idx = lo; idx < hi; ++idx) vmax = std::max(vmax, std::abs(s.v.v[idx]));
    denom += vmax * (c == 0 ? s.v.n0 : s.v.n1);
  }
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return cfl_max / denom;
}

void hsle_step(SemiLagrangianState& s, double dt, double cfl_max) {
  if (!(dt > 0)) throw std::invalid_argument("hsle_step: dt must be positive");
  const double adm = admissible_dt_sl(s, cfl_max);
  if (dt > adm) throw CflError("hsle_step: CFL number exceeds limit", adm);

  const HsleDerivative k1 = hsle_rhs(s);
  SemiLagrangianState s2 = s;
  axpy(s2.v.v, 0.5 * dt, k1.dv.v);
  axpy(s2.ha.v, 0.5 * dt, k1.dha.v);
  const HsleDerivative k2 = hsle_rhs(s2);
  SemiLagrangianState s3 = s;
  axpy(s3.v.v, 0.5 * dt, k2.dv.v);
  axpy(s3.ha.v, 0.5 * dt, k2.dha.v);
  const HsleDerivative k3 = hsle_rhs(s3);
  SemiLagrangianState s4 = s;
  axpy(s4.v.v, dt, k3.dv.v);
  axpy(s4.ha.v, dt, k3.dha.v);
  const HsleDerivative k4 = hsle_rhs(s4);

  const double w = dt / 6.0;
  for (std::size_t i = 0; i < s.v.v.size(); ++i)
    s.v.v[i] += w * (k1.dv.v[i] + 2.0 * k2.dv.v[i] + 2.0 * k3.dv.v[i] + k4.dv.v[i]);
  for (std::size_t i = 0; i < s.ha.v.size(); ++i)
    s.ha.v[i] += w * (k1.dha.v[i] + 2.0 * k2.dha.v[i] + 2.0 * k3.dha.v[i] + k4.dha.v[i]);
  s.t += dt;
}

double curl_sup(const TorusField& v) {
  if (v.d == 1) return 0.0;
  TorusField d0 = ddx_axis(v, 0);
  TorusField d1 = ddx_axis(v, 1);
  double sup = 0.0;
  for (int sp = 0; sp < v.nsp(); ++sp)
    for (int m = 0; m < v.na; ++m)
      sup = std::max(sup, std::abs(d0.at(1, sp, m) - d1.at(0, sp, m)));
  return sup;
}

double mass_deviation(const TorusField& ha) {
  const auto w = label_weights(ha.na);
  double dev = 0.0;
  for (int sp = 0; sp < ha.nsp(); ++sp) {
    double mass = 0.0;
    for (int m = 0; m < ha.na; ++m) mass += w[m] * ha.at(0, sp, m);
    dev = std::max(dev, std::abs(mass - 1.0));
  }
  return dev;
}

double tail_fraction_sl(const TorusField& f) {
  double num = 0.0, den = 0.0;
  std::vector<double> line;
  std::vector<std::complex<double>> spec;
  auto add_axis = [&](int axis) {
    const int n = axis == 0 ? f.n0 : f.n1;
    if (n < 8) return;
    const int kmax = n / 3;
    const int klo = (2 * kmax) / 3 + 1;
    line.resize(n);
    spec.resize(n / 2 + 1);
    const int nother = axis == 0 ? f.n1 : f.n0;
    for (int c = 0; c < f.ncomp; ++c)
      for (int other = 0; other < nother; ++other)
        for (int m = 0; m < f.na; ++m) {
          for (int q = 0; q < n; ++q) {
            const int s = axis == 0 ? q * f.n1 + other : other * f.n1 + q;
            line[q] = f.at(c, s, m);
          }
          fft::forward(line, spec);
          for (int q = 1; q <= kmax; ++q) {
            const double e = std::norm(spec[q]);
            den += e;
            if (q >= klo) num += e;
          }
        }
  };
  add_axis(0);
  if (f.d == 2) add_axis(1);
  return den > 0.0 ? num / den : 0.0;
}

CompatibilityReport enforce_compatibility(SemiLagrangianState& s) {
  CompatibilityReport rep;
  const auto w = label_weights(s.ha.na);
  const int nsp = s.ha.nsp(), na = s.ha.na;

  for (int sp = 0; sp < nsp; ++sp) {
    double mass = 0.0;
    for (int m = 0; m < na; ++m) mass += w[m] * s.ha.at(0, sp, m);
    rep.mass_shift = std::max(rep.mass_shift, std::abs(mass - 1.0));
    if (mass > 0.0)
      for (int m = 0; m < na; ++m) s.ha.at(0, sp, m) /= mass;
  }

  if (s.d == 1) {
    std::vector<double> flux(nsp, 0.0);
    for (int sp = 0; sp < nsp; ++sp)
      for (int m = 0; m < na; ++m) flux[sp] += w[m] * s.v.at(0, sp, m) * s.ha.at(0, sp, m);
    const double mean = pairwise_sum(flux) / nsp;
    for (int sp = 0; sp < nsp; ++sp) {
      const double delta = flux[sp] - mean;
      rep.flux_shift = std::max(rep.flux_shift, std::abs(delta));
      for (int m = 0; m < na; ++m) s.v.at(0, sp, m) -= delta;
    }
    return rep;
  }

  TorusField fl(s.d, s.v.n0, s.v.n1, 1, s.d);
  for (int c = 0; c < s.d; ++c)
    for (int sp = 0; sp < nsp; ++sp) {
      double acc = 0.0;
      for (int m = 0; m < na; ++m) acc += w[m] * s.v.at(c, sp, m) * s.ha.at(0, sp, m);
      fl.at(c, sp, 0) = acc;
    }
  TorusField div(s.d, s.v.n0, s.v.n1, 1, 1);
  for (int c = 0; c < s.d; ++c) {
    TorusField one(s.d, s.v.n0, s.v.n1, 1, 1);
    for (int sp = 0; sp < nsp; ++sp) one.at(0, sp, 0) = fl.at(c, sp, 0);
    TorusField g = ddx_axis(one, c);
    for (int sp = 0; sp < nsp; ++sp) div.at(0, sp, 0) += g.at(0, sp, 0);
  }
  TorusField p = poisson_inverse_torus(div);
  for (int c = 0; c < s.d; ++c) {
    TorusField gp = ddx_axis(p, c);
    for (int sp = 0; sp < nsp; ++sp) {
      const double corr = -gp.at(0, sp, 0);
      rep.flux_shift = std::max(rep.flux_shift, std::abs(corr));
      for (int m = 0; m < na; ++m) s.v.at(c, sp, m) -= corr;
    }
  }
  return rep;
}

namespace {

struct SlCore {
  bool finite = true;
  bool resolved = false;
  double min_ha = 0, mass_dev = 0, curl = 0, tail = 0;
  double kinetic = 0, e1 = 0, e2 = 0, d1 = 0, d2 = 0, entropy = 0;
  double bcc_lhs = 0, bcc_rhs = 0, pressure_mean = 0;
};

SlCore sl_core(const SemiLagrangianState& s) {
  SlCore c;
  c.finite = all_finite(s.v) && all_finite(s.ha);
  double mn = s.ha.v.empty() ? 0.0 : s.ha.v[0];
  const int nsp = s.ha.nsp(), na = s.ha.na, d = s.d;
  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) mn = std::min(mn, s.ha.at(0, sp, m));
  c.min_ha = mn;
  c.mass_dev = mass_deviation(s.ha);
  c.curl = curl_sup(s.v);
  c.tail = std::max(tail_fraction_sl(s.v), tail_fraction_sl(s.ha));
  c.resolved = c.finite && mn > 0.0;

  TorusField scalar(d, s.v.n0, s.v.n1, na, 1);
  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) {
      double acc = 0.0;
      for (int cc = 0; cc < d; ++cc) {
        const double z = s.v.at(cc, sp, m);
        acc += z * z;
      }
      scalar.at(0, sp, m) = acc * s.ha.at(0, sp, m);
    }
  c.kinetic = integrate_xa(scalar);

  const auto wts = label_weights(na);
  double lhs = 0.0;
  for (int m = 0; m < na; ++m) {
    double vsq = 0.0;
    for (int cc = 0; cc < d; ++cc) {
      const double vc = integrate_x(s.v, cc, m);
      vsq += vc * vc;
    }
    lhs += wts[m] * vsq * integrate_x(s.ha, 0, m);
  }
  c.bcc_lhs = lhs;
  c.bcc_rhs = c.kinetic;

  if (!c.resolved) return c;

  const HsleDerivative rhs = hsle_rhs(s);
  c.pressure_mean = rhs.pressure_mean;

  TorusField div(d, s.v.n0, s.v.n1, na, 1);
  TorusField gradsq(d, s.v.n0, s.v.n1, na, 1);
  for (int j = 0; j < d; ++j) {
    TorusField dj = ddx_axis(s.v, j);
    for (int sp = 0; sp < nsp; ++sp)
      for (int m = 0; m < na; ++m) {
        div.at(0, sp, m) += dj.at(j, sp, m);
        for (int cc = 0; cc < d; ++cc) {
          const double z = dj.at(cc, sp, m);
          gradsq.at(0, sp, m) += z * z;
        }
      }
  }

  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) scalar.at(0, sp, m) = -div.at(0, sp, m) * s.ha.at(0, sp, m);
  c.e1 = integrate_xa(scalar);

  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) scalar.at(0, sp, m) = gradsq.at(0, sp, m) * s.ha.at(0, sp, m);
  c.d1 = integrate_xa(scalar);

  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) {
      double dot = 0.0, sq = 0.0;
      for (int cc = 0; cc < d; ++cc) {
        const double vt = rhs.dv.at(cc, sp, m);
        dot += s.v.at(cc, sp, m) * vt;
        sq += vt * vt;
      }
      scalar.at(0, sp, m) = dot * s.ha.at(0, sp, m);
      gradsq.at(0, sp, m) = sq * s.ha.at(0, sp, m);
    }
  c.e2 = integrate_xa(scalar);
  c.d2 = integrate_xa(gradsq);

  for (int sp = 0; sp < nsp; ++sp)
    for (int m = 0; m < na; ++m) {
      const double hv = s.ha.at(0, sp, m);
      scalar.at(0, sp, m) = hv * std::log(hv);
    }
  c.entropy = integrate_xa(scalar);
  return c;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string sl_csv_header() {
  return "t,E1,E2,D1,D2,entropy,kinetic,bccLhs,bccRhs,minHa,massDev,curl,pressureMean,"
         "cumD1,cumD2,cumE1,LB_E1,LB_E2,logLB,lpGap,lpMonoMin,tailFraction,"
         "resolved,lbE1On,lbE2On,okMass,okKinetic,okBccLhs,okBccRhs,okQuadE1,okQuadE2,"
         "okLbE1,okLogLb,okLbE2,okIdentE1,okIdentE2,okIdentEntropy,okJensen,okLpMono";
}

std::string sl_csv_row(const SlRecord& r) {
  std::string s;
  const double vals[] = {r.t,     r.e1,      r.e2,      r.d1,       r.d2,     r.entropy,
                         r.kinetic, r.bcc_lhs, r.bcc_rhs, r.min_ha,  r.mass_dev, r.curl,
                         r.pressure_mean, r.cum_d1, r.cum_d2, r.cum_e1, r.lb_e1, r.lb_e2,
                         r.log_lb, r.lp_gap,  r.lp_mono_min, r.tail_fraction};
  for (double v : vals) {
    s += fmt17(v);
    s += ',';
  }
  const bool flags[] = {r.resolved,   r.lb_e1_on,   r.lb_e2_on,  r.ok_mass,     r.ok_kinetic,
                        r.ok_bcc_lhs, r.ok_bcc_rhs, r.ok_cs_e1,  r.ok_cs_e2,    r.ok_lb_e1,
                        r.ok_log_lb,  r.ok_lb_e2,   r.ok_ident_e1, r.ok_ident_e2,
                        r.ok_ident_entropy, r.ok_jensen, r.ok_lp_mono};
  for (std::size_t i = 0; i < std::size(flags); ++i) {
    s += flags[i] ? '1' : '0';
    if (i + 1 < std::size(flags)) s += ',';
  }
  return s;
}

void SlDiagnosticEngine::Tracker::update(bool applicable, bool ok, double margin, double t) {
  if (!applicable) return;
  if (!seen || margin < min_margin) min_margin = margin;
  seen = true;
  if (!ok) {
    if (violations == 0) first_violation_t = t;
    ++violations;
    failed = true;
  }
}

nlohmann::json SlDiagnosticEngine::Tracker::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["status"] = !seen ? "not-applicable" : (failed ? "fail" : "pass");
  j["first_violation_t"] = failed ? nlohmann::json(first_violation_t) : nlohmann::json();
  j["min_margin"] = seen ? nlohmann::json(min_margin) : nlohmann::json();
  j["violations"] = violations;
  return j;
}

SlDiagnosticEngine::Tracker& SlDiagnosticEngine::tracker(const std::string& name) {
  for (auto& t : trackers_)
    if (t.name == name) return t;
  trackers_.push_back(Tracker{name});
  return trackers_.back();
}

bool SlDiagnosticEngine::certify(const std::string& name, bool applicable, double lhs, double rhs,
                                 double t) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  const double slack = 1e-9 + 1e-6 * scale;
  const double margin = lhs - rhs;
  const bool ok = !applicable || margin + slack >= 0.0;
  tracker(name).update(applicable, ok, margin, t);
  return ok;
}

SlDiagnosticEngine::SlDiagnosticEngine(const SemiLagrangianState& s0,
                                       std::vector<double> lp_list)
    : d_(s0.d), lp_list_(std::move(lp_list)) {
  static const char* names[] = {
      "mass-constraint", "kinetic-invariant",   "bcc-lhs-invariant", "bcc-rhs-invariant",
      "quadratic-growth-e1", "quadratic-growth-e2", "lower-bound-e1", "log-lower-bound-e1",
      "lower-bound-e2",  "identity-e1",         "identity-e2",       "identity-entropy",
      "jensen-lp",       "lp-monotone"};
  trackers_.reserve(std::size(names));
  for (const char* n : names) trackers_.push_back(Tracker{n});

  const SlCore c = sl_core(s0);
  kinetic0_ = c.kinetic;
  e1_0_ = c.e1;
  e2_0_ = c.e2;
  entropy0_ = c.entropy;
  bcc_lhs0_ = c.bcc_lhs;
  bcc_rhs0_ = c.bcc_rhs;
  if (e1_0_ > 0.0) pole_e1_ = d_ / e1_0_;
  if (e2_0_ > 0.0 && kinetic0_ > 0.0) pole_e2_ = kinetic0_ / e2_0_;
}

SlRecord SlDiagnosticEngine::sample(const SemiLagrangianState& s) {
  const SlCore c = sl_core(s);
  SlRecord r;
  r.t = s.t;
  r.resolved = c.resolved;
  r.min_ha = c.min_ha;
  r.mass_dev = c.mass_dev;
  r.curl = c.curl;
  r.tail_fraction = c.tail;
  r.kinetic = c.kinetic;
  r.bcc_lhs = c.bcc_lhs;
  r.bcc_rhs = c.bcc_rhs;
  r.pressure_mean = c.pressure_mean;

  double gm = 0.0, min_norm = 0.0;
  if (c.resolved) {
    r.e1 = c.e1;
    r.e2 = c.e2;
    r.d1 = c.d1;
    r.d2 = c.d2;
    r.entropy = c.entropy;

    if (have_prev_) {
      const double dt = s.t - prev_t_;
      cum_d1_ += 0.5 * dt * (prev_d1_ + c.d1);
      cum_d2_ += 0.5 * dt * (prev_d2_ + c.d2);
      cum_e1_ += 0.5 * dt * (prev_e1_ + c.e1);
    }

    if (!lp_list_.empty()) {
      const auto wts = label_weights(s.ha.na);
      const int nsp = s.ha.nsp(), na = s.ha.na;
      WeightedSamples ws;
      ws.values.reserve(static_cast<std::size_t>(nsp) * na);
      ws.weights.reserve(ws.values.capacity());
      for (int sp = 0; sp < nsp; ++sp)
        for (int m = 0; m < na; ++m) {
          const double hv = s.ha.at(0, sp, m);
          ws.values.push_back(hv);
          ws.weights.push_back(wts[m] / nsp * hv);
        }
      const double tot = pairwise_sum(ws.weights);
      for (auto& w : ws.weights) w /= tot;
      gm = geometric_mean(ws);
      std::vector<double> norms;
      for (double p : lp_list_) norms.push_back(p_norm(ws, p));
      min_norm = *std::min_element(norms.begin(), norms.end());
      double mono = 0.0;
      bool first = true;
      for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
        const double dlt = norms[i] - norms[i + 1];
        mono = first ? dlt : std::min(mono, dlt);
        first = false;
      }
      r.lp_gap = norms.back() - gm;
      r.lp_mono_min = norms.size() > 1 ? mono : 0.0;
    }
  }
  r.cum_d1 = cum_d1_;
  r.cum_d2 = cum_d2_;
  r.cum_e1 = cum_e1_;

  const double t = s.t;
  r.lb_e1_on = pole_e1_ > 0.0 && t < pole_e1_;
  r.lb_e2_on = pole_e2_ > 0.0 && t < pole_e2_;
  if (r.lb_e1_on) {
    r.lb_e1 = d_ / (pole_e1_ - t);
    r.log_lb = d_ * std::log(pole_e1_ / (pole_e1_ - t));
  }
  if (r.lb_e2_on) r.lb_e2 = kinetic0_ / (pole_e2_ - t);

  const bool res = c.resolved;
  r.ok_mass = certify("mass-constraint", true, 1e-8, c.mass_dev, t);
  r.ok_kinetic = certify("kinetic-invariant", true, 1e-6 * std::abs(kinetic0_),
                         std::abs(c.kinetic - kinetic0_), t);
  r.ok_bcc_lhs = certify("bcc-lhs-invariant", true, 1e-6 * std::abs(bcc_lhs0_),
                         std::abs(c.bcc_lhs - bcc_lhs0_), t);
  r.ok_bcc_rhs = certify("bcc-rhs-invariant", true, 1e-6 * std::abs(bcc_rhs0_),
                         std::abs(c.bcc_rhs - bcc_rhs0_), t);
  r.ok_cs_e1 = certify("quadratic-growth-e1", res, d_ * c.d1, c.e1 * c.e1, t);
  r.ok_cs_e2 = certify("quadratic-growth-e2", res, c.kinetic * c.d2, c.e2 * c.e2, t);
  r.ok_lb_e1 = certify("lower-bound-e1", res && r.lb_e1_on, c.e1, r.lb_e1, t);
  r.ok_log_lb =
      certify("log-lower-bound-e1", res && r.lb_e1_on, c.entropy - entropy0_, r.log_lb, t);
  r.ok_lb_e2 = certify("lower-bound-e2", res && r.lb_e2_on, c.e2, r.lb_e2, t);

  {
    const double dev1 = std::abs(cum_d1_ - (c.e1 - e1_0_));
    const double sc1 = std::max(std::abs(cum_d1_), std::abs(c.e1 - e1_0_));
    const bool ok1 = !res || dev1 <= 1e-3 * sc1 + 1e-9;
    tracker("identity-e1").update(res, ok1, 1e-3 * sc1 - dev1, t);
    r.ok_ident_e1 = ok1;
    const double dev2 = std::abs(cum_d2_ - (c.e2 - e2_0_));
    const double sc2 = std::max(std::abs(cum_d2_), std::abs(c.e2 - e2_0_));
    const bool ok2 = !res || dev2 <= 1e-3 * sc2 + 1e-9;
    tracker("identity-e2").update(res, ok2, 1e-3 * sc2 - dev2, t);
    r.ok_ident_e2 = ok2;
    const double dh = c.entropy - entropy0_;
    const double dev3 = std::abs(cum_e1_ - dh);
    const double sc3 = std::max(std::abs(cum_e1_), std::abs(dh));
    const bool ok3 = !res || dev3 <= 1e-3 * sc3 + 1e-9;
    tracker("identity-entropy").update(res, ok3, 1e-3 * sc3 - dev3, t);
    r.ok_ident_entropy = ok3;
  }

  const bool lp_app = res && !lp_list_.empty();
  r.ok_jensen = certify("jensen-lp", lp_app, min_norm, gm, t);
  {
    const bool ok = !lp_app || lp_list_.size() < 2 || r.lp_mono_min >= -1e-12 - 1e-9;
    tracker("lp-monotone").update(lp_app && lp_list_.size() > 1, ok, r.lp_mono_min, t);
    r.ok_lp_mono = ok;
  }

  if (c.resolved) {
    prev_t_ = s.t;
    prev_d1_ = c.d1;
    prev_d2_ = c.d2;
    prev_e1_ = c.e1;
    have_prev_ = true;
  }
  hist_.push_back(r);
  return r;
}

bool SlDiagnosticEngine::all_passed() const {
  for (const auto& t : trackers_)
    if (t.failed) return false;
  return true;
}

nlohmann::json SlDiagnosticEngine::summary() const {
  nlohmann::json j;
  j["constants"] = {{"kinetic0", kinetic0_}, {"e1_0", e1_0_},       {"e2_0", e2_0_},
                    {"entropy0", entropy0_}, {"bcc_lhs0", bcc_lhs0_}, {"bcc_rhs0", bcc_rhs0_}};
  j["pole_estimates"]["e1"] = pole_e1_ > 0.0 ? nlohmann::json(pole_e1_) : nlohmann::json();
  j["pole_estimates"]["e2"] = pole_e2_ > 0.0 ? nlohmann::json(pole_e2_) : nlohmann::json();
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& t : trackers_) certs.push_back(t.to_json());
  j["certifications"] = certs;
  nlohmann::json bcc;
  bcc["lhs0"] = bcc_lhs0_;
  bcc["rhs0"] = bcc_rhs0_;
  bcc["gap0"] = bcc_rhs0_ - bcc_lhs0_;
  if (!hist_.empty()) {
    bcc["lhs_final"] = hist_.back().bcc_lhs;
    bcc["rhs_final"] = hist_.back().bcc_rhs;
  }
  j["balance_condition"] = bcc;
  return j;
}

}  // namespace rayleigh
