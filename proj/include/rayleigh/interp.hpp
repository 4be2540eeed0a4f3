#pragma once

#include <span>
#include <vector>

namespace rayleigh {

// Monotonicity-preserving cubic Hermite interpolant (Fritsch-Carlson slopes)
// through samples on a uniform node set. Used for wall-to-wall profiles.
class MonotoneCubic {
 public:
  MonotoneCubic(std::span<const double> nodes, std::span<const double> values);

  double eval(double t) const;
  double deriv(double t) const;

  // Solves f(t) = target for strictly increasing data: Newton accelerated,
  // bisection safeguarded, converging to the bracket width tol.
  double invert(double target, double tol = 1e-12, int max_iter = 90) const;

 private:
  int cell(double t) const;
  std::vector<double> t_, f_, s_;
  double h_;
};

}  // namespace rayleigh
