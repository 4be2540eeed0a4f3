#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rayleigh/logmean.hpp"

using namespace rayleigh;

namespace {

WeightedSamples exp_samples(int n) {
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = std::exp(static_cast<double>(i) / (n - 1));
  return trapezoid_samples(vals);
}

}  // namespace

TEST_CASE("trapezoid sampling builds a probability weighting") {
  auto s = exp_samples(11);
  REQUIRE(s.weights.size() == 11);
  double sum = 0;
  for (double w : s.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.weights.front() == doctest::Approx(0.05));
  CHECK(s.weights[5] == doctest::Approx(0.1));
  s.validate();
}

TEST_CASE("validation rejects bad inputs") {
  WeightedSamples s{{1.0, -2.0}, {0.5, 0.5}};
  CHECK_THROWS_AS(s.validate(), std::domain_error);
  WeightedSamples t{{1.0, 2.0}, {0.5, 0.4}};
  CHECK_THROWS_AS(t.validate(), std::domain_error);
  WeightedSamples u{{1.0, 2.0}, {0.5}};
  CHECK_THROWS_AS(u.validate(), std::domain_error);
}

TEST_CASE("two-point closed forms") {
  WeightedSamples s{{1.0, 4.0}, {0.5, 0.5}};
  CHECK(geometric_mean(s) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p_norm(s, 1.0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(p_norm(s, 2.0) == doctest::Approx(std::sqrt(8.5)).epsilon(1e-14));
  CHECK(p_norm(s, 0.5) == doctest::Approx(2.25).epsilon(1e-14));  // ((1+2)/2)^2
}

TEST_CASE("constant samples are a fixed point of every mean") {
  WeightedSamples s{{3.0, 3.0, 3.0}, {0.25, 0.5, 0.25}};
  CHECK(geometric_mean(s) == doctest::Approx(3.0).epsilon(1e-14));
  for (double p : {1.0, 0.3, 0.01}) CHECK(p_norm(s, p) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("p-norms of exp(x) match the analytic family") {
  auto s = exp_samples(4001);
  // ||exp||_p = ((e^p - 1)/p)^(1/p); the trapezoid bias is ~5e-9 here
  for (double p : {1.0, 0.5, 0.1}) {
    const double exact = std::pow((std::exp(p) - 1.0) / p, 1.0 / p);
    CHECK(p_norm(s, p) == doctest::Approx(exact).epsilon(1e-7));
  }
  CHECK(geometric_mean(s) == doctest::Approx(oracles::kRootE).epsilon(1e-7));
}

TEST_CASE("p-norm scaling") {
  auto s = exp_samples(101);
  WeightedSamples sc = s;
  for (auto& v : sc.values) v *= 7.0;
  CHECK(p_norm(sc, 0.3) == doctest::Approx(7.0 * p_norm(s, 0.3)).epsilon(1e-13));
  CHECK(geometric_mean(sc) == doctest::Approx(7.0 * geometric_mean(s)).epsilon(1e-13));
}

TEST_CASE("limit study: monotone in p and pinched onto the geometric mean") {
  auto s = exp_samples(2001);
  const std::vector<double> ps{1.0, 0.5, 0.1, 0.01, 0.001, 0.0001};
  const LimitStudy st = limit_study(s, ps);
  REQUIRE(st.norms.size() == ps.size());
  for (double d : st.diffs) CHECK(d >= -1e-12);
  for (double n : st.norms) CHECK(n >= st.geometric - 1e-12);
  CHECK(st.gap >= 0.0);
  CHECK(st.gap < 1e-4);
  // the gap shrinks linearly in p
  const double gap_tenth = st.norms[3] - st.geometric;  // p = 0.01
  const double gap_whole = st.norms[2] - st.geometric;  // p = 0.1
  CHECK(gap_whole / gap_tenth == doctest::Approx(10.0).epsilon(0.05));

  const nlohmann::json j = to_json(st);
  CHECK(j.at("nonincreasing").get<bool>());
  CHECK(j.at("jensen_ok").get<bool>());
  CHECK(j.at("norms").size() == ps.size());
}

TEST_CASE("small-p norms of exp approach sqrt(e) at the documented rate") {
  auto s = exp_samples(10000);
  const double near = p_norm(s, 1e-3);
  CHECK(std::abs(near - oracles::kRootE) / oracles::kRootE < 3e-4);
  CHECK(near >= geometric_mean(s) - 1e-12);
}
