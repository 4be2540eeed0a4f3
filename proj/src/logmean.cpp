#include "rayleigh/logmean.hpp"

#include <cmath>
#include <stdexcept>

#include "rayleigh/reduce.hpp"

namespace rayleigh {

void WeightedSamples::validate() const {
  if (values.empty() || values.size() != weights.size())
    throw std::domain_error("weighted samples: size mismatch or empty");
  double wsum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::domain_error("weighted samples: value <= 0");
    if (weights[i] < 0.0) throw std::domain_error("weighted samples: negative weight");
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::domain_error("weighted samples: weights do not sum to 1");
}

WeightedSamples trapezoid_samples(std::span<const double> values) {
  const std::size_t n = values.size();
  WeightedSamples s;
  s.values.assign(values.begin(), values.end());
  s.weights.assign(n, 0.0);
  if (n == 1) {
    s.weights[0] = 1.0;
    return s;
  }
  const double h = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    s.weights[i] = (i == 0 || i + 1 == n) ? 0.5 * h : h;
  return s;
}

double geometric_mean(const WeightedSamples& s) {
  s.validate();
  std::vector<double> terms(s.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i] = s.weights[i] * std::log(s.values[i]);
  return std::exp(pairwise_sum(terms));
}

double p_norm(const WeightedSamples& s, double p) {
  s.validate();
  if (!(p > 0.0)) throw std::domain_error("p-norm: p must be positive");
  std::vector<double> terms(s.values.size());
  if (p < 0.01) {
    // f^p clusters at 1 for small p; sum mu*(f^p - 1) instead and restore
    // through log1p to avoid the cancellation in (sum mu f^p)^(1/p).
    for (std::size_t i = 0; i < terms.size(); ++i)
      terms[i] = s.weights[i] * std::expm1(p * std::log(s.values[i]));
    return std::exp(std::log1p(pairwise_sum(terms)) / p);
  }
  for (std::size_t i = 0; i < terms.size(); ++i)
    terms[i] = s.weights[i] * std::pow(s.values[i], p);
  return std::pow(pairwise_sum(terms), 1.0 / p);
}

LimitStudy limit_study(const WeightedSamples& s, std::span<const double> ps) {
  if (ps.empty()) throw std::domain_error("limit study: empty p sequence");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i] > 0.0)) throw std::domain_error("limit study: p must be positive");
    if (i > 0 && !(ps[i] < ps[i - 1]))
      throw std::domain_error("limit study: p sequence must be strictly decreasing");
  }
  LimitStudy st;
  st.p.assign(ps.begin(), ps.end());
  for (double p : ps) st.norms.push_back(p_norm(s, p));
  for (std::size_t i = 0; i + 1 < st.norms.size(); ++i)
    st.diffs.push_back(st.norms[i] - st.norms[i + 1]);
  st.geometric = geometric_mean(s);
  st.gap = st.norms.back() - st.geometric;
  return st;
}

nlohmann::json to_json(const LimitStudy& st) {
  nlohmann::json j;
  j["p"] = st.p;
  j["norms"] = st.norms;
  j["diffs"] = st.diffs;
  j["geometric_mean"] = st.geometric;
  j["gap_at_smallest_p"] = st.gap;
  bool mono = true;
  for (double d : st.diffs) mono = mono && d >= -1e-12;
  bool jensen = true;
  for (double n : st.norms) jensen = jensen && st.geometric <= n * (1.0 + 1e-12) + 1e-15;
  j["nonincreasing"] = mono;
  j["jensen_ok"] = jensen;
  return j;
}

}  // namespace rayleigh
