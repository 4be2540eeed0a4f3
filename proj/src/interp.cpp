#include "rayleigh/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rayleigh {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double edge_slope(double d_near, double d_far) {
  double s = 0.5 * (3.0 * d_near - d_far);
  if (sgn(s) != sgn(d_near))
    s = 0.0;
  else if (sgn(d_near) != sgn(d_far) && std::abs(s) > 3.0 * std::abs(d_near))
    s = 3.0 * d_near;
  return s;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::span<const double> nodes, std::span<const double> values)
    : t_(nodes.begin(), nodes.end()), f_(values.begin(), values.end()) {
  const std::size_t n = t_.size();
  if (n < 3 || f_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 3 matched samples");
  h_ = t_[1] - t_[0];
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (f_[k + 1] - f_[k]) / h_;
  s_.resize(n);
  s_.front() = edge_slope(d.front(), d[1]);
  s_.back() = edge_slope(d[n - 2], d[n - 3]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] == 0.0 || d[k] == 0.0 || sgn(d[k - 1]) != sgn(d[k]))
      s_[k] = 0.0;
    else
      s_[k] = 2.0 * d[k - 1] * d[k] / (d[k - 1] + d[k]);
  }
}

int MonotoneCubic::cell(double t) const {
  const int n = static_cast<int>(t_.size());
  int k = static_cast<int>(std::floor((t - t_.front()) / h_));
  return std::clamp(k, 0, n - 2);
}

double MonotoneCubic::eval(double t) const {
  const int k = cell(t);
  const double th = (t - t_[k]) / h_;
  const double t2 = th * th, t3 = t2 * th;
  return f_[k] * (2.0 * t3 - 3.0 * t2 + 1.0) + h_ * s_[k] * (t3 - 2.0 * t2 + th) +
         f_[k + 1] * (-2.0 * t3 + 3.0 * t2) + h_ * s_[k + 1] * (t3 - t2);
}

double MonotoneCubic::deriv(double t) const {
  const int k = cell(t);
  const double th = (t - t_[k]) / h_;
  const double t2 = th * th;
  return (f_[k + 1] - f_[k]) / h_ * (6.0 * th - 6.0 * t2) + s_[k] * (3.0 * t2 - 4.0 * th + 1.0) +
         s_[k + 1] * (3.0 * t2 - 2.0 * th);
}

double MonotoneCubic::invert(double target, double tol, int max_iter) const {
  double lo = t_.front(), hi = t_.back();
  if (target <= f_.front()) return lo;
  if (target >= f_.back()) return hi;
  double t = lo + (hi - lo) * (target - f_.front()) / (f_.back() - f_.front());
  for (int it = 0; it < max_iter; ++it) {
    const double r = eval(t) - target;
    if (r == 0.0) return t;
    if (r < 0.0)
      lo = t;
    else
      hi = t;
    if (hi - lo < tol) break;
    const double dr = deriv(t);
    double tn = dr > 0.0 ? t - r / dr : lo;
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    t = tn;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rayleigh
