#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace rayleigh {

// Fields on the periodic box [0,1)^d crossed with a label interval [0,1].
// Spatial nodes x_i = i/n per axis (rectangle rule); label nodes
// a_m = m/(na-1) including both endpoints (trapezoid rule), or the single
// label a = 0 when na == 1 (spatial-only fields such as the pressure).
// Storage is component-major, spatial row-major, label fastest:
// idx = (c * nsp + s) * na + m with s = i0 * n1 + i1.
struct TorusField {
  int d = 1;
  int n0 = 0;
  int n1 = 1;
  int na = 1;
  int ncomp = 1;
  std::vector<double> v;

  TorusField() = default;
  TorusField(int d_, int n0_, int n1_, int na_, int ncomp_, double fill = 0.0);

  int nsp() const { return n0 * n1; }
  std::size_t plane(int c, int s) const {
    return (static_cast<std::size_t>(c) * nsp() + s) * na;
  }
  double& at(int c, int s, int m) { return v[plane(c, s) + m]; }
  double at(int c, int s, int m) const { return v[plane(c, s) + m]; }
};

std::vector<double> label_nodes(int na);
std::vector<double> label_weights(int na);  // trapezoid, sum 1; {1} when na == 1

bool all_finite(const TorusField& f);
void require_finite(const TorusField& f, const char* what);

// Spectral derivative along spatial axis 0 or 1, every component and label.
TorusField ddx_axis(const TorusField& f, int axis);

// 2/3-rule truncation along each spatial axis, in place.
void dealias_torus(TorusField& f);

// Solve -lap(P) = g on the torus for a spatial-only scalar g; the mean of g
// is projected out first and its magnitude reported through mean_removed.
TorusField poisson_inverse_torus(const TorusField& g, double* mean_removed = nullptr);

// Rectangle rule over space and trapezoid over labels.
double integrate_xa(const TorusField& f, int comp = 0);
// Rectangle rule over space for one label plane.
double integrate_x(const TorusField& f, int comp = 0, int m = 0);
// Trapezoid over labels at every spatial node.
std::vector<double> integrate_a(const TorusField& f, int comp = 0);

}  // namespace rayleigh
