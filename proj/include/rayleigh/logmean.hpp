#pragma once

#include <span>
#include <vector>

#include "json.hpp"

namespace rayleigh {

// Positive samples under a probability weighting. Weights must sum to 1
// within 1e-12; values must be strictly positive.
struct WeightedSamples {
  std::vector<double> values;
  std::vector<double> weights;
  void validate() const;  // throws std::domain_error
};

// Uniform-trapezoid sampling of f on [0,1] with n nodes.
WeightedSamples trapezoid_samples(std::span<const double> values);

double geometric_mean(const WeightedSamples& s);
double p_norm(const WeightedSamples& s, double p);

struct LimitStudy {
  std::vector<double> p;
  std::vector<double> norms;
  std::vector<double> diffs;  // norms[i] - norms[i+1], expected >= -1e-12
  double geometric = 0;
  double gap = 0;  // norms.back() - geometric
};

// Evaluate the p-norm family along a strictly decreasing positive sequence
// and compare the tail against the geometric mean.
LimitStudy limit_study(const WeightedSamples& s, std::span<const double> ps);
nlohmann::json to_json(const LimitStudy& st);

}  // namespace rayleigh
