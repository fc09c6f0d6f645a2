#include <cmath>
#include <vector>

#include "doctest.h"

#include "cvl/metrics.hpp"
#include "cvl/value_dist.hpp"

using cvl::DiscreteValueDistribution;

namespace {

DiscreteValueDistribution two_atom() {
  return DiscreteValueDistribution({0.2, 0.8}, {0.5, 0.5}, 1.0);
}

}  // namespace

TEST_CASE("construction sorts and merges duplicates") {
  const DiscreteValueDistribution d({0.8, 0.2, 0.2 + 1e-14}, {0.25, 0.25, 0.5}, 1.0);
  REQUIRE(d.size() == 2);
  CHECK(d.atoms()[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(d.weights()[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(d.weights()[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("construction rejects bad input") {
  CHECK_THROWS(DiscreteValueDistribution({0.5}, {0.9}, 1.0));
  CHECK_THROWS(DiscreteValueDistribution({1.5}, {1.0}, 1.0));
  CHECK_THROWS(DiscreteValueDistribution({-0.1}, {1.0}, 1.0));
  CHECK_THROWS(DiscreteValueDistribution({0.2, 0.8}, {0.5}, 1.0));
}

TEST_CASE("cdf is a right-continuous step function") {
  const auto d = two_atom();
  CHECK(d.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.cdf(0.8) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.cdf(-0.1) == 0.0);
  CHECK(d.cdf(0.2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.cdf(2.0) == 1.0);
}

TEST_CASE("tail probability accepts at equality") {
  const auto d = two_atom();
  CHECK(d.tail_prob(0.8) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.tail_prob(0.2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.tail_prob(0.81) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("capped expectation") {
  const auto d = two_atom();
  CHECK(d.capped_expectation(0.5) == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(d.capped_expectation(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.capped_expectation(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // negative caps reduce to the mean
  CHECK(d.capped_expectation(-2.0) == doctest::Approx(0.5).epsilon(1e-12));
  // 1-Lipschitz and nondecreasing in c
  double prev = d.capped_expectation(0.0);
  for (int i = 1; i <= 100; ++i) {
    const double cur = d.capped_expectation(i * 0.01);
    CHECK(cur >= prev - 1e-12);
    CHECK(cur - prev <= 0.01 + 1e-12);
    prev = cur;
  }
}

TEST_CASE("plus-eps shift of a point mass") {
  const auto d = DiscreteValueDistribution::point_mass(0.5, 1.0);
  const auto s = d.shift_plus_eps(0.1);
  REQUIRE(s.size() == 2);
  CHECK(s.atoms()[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.weights()[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.atoms()[1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s.weights()[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("plus-eps shift clamps below zero") {
  const auto s = DiscreteValueDistribution::point_mass(0.05, 1.0).shift_plus_eps(0.1);
  REQUIRE(s.size() == 1);
  CHECK(s.atoms()[0] == 0.0);
  CHECK(s.weights()[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plus-eps shift properties") {
  cvl::Rng rng(7);
  CHECK_THROWS(two_atom().shift_plus_eps(-0.1));
  for (int t = 0; t < 200; ++t) {
    std::vector<double> atoms, weights;
    const std::size_t k = 1 + rng.pick_index(5);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      atoms.push_back(rng.uniform01());
      weights.push_back(rng.uniform(0.1, 1.0));
      total += weights.back();
    }
    for (double& w : weights) w /= total;
    const DiscreteValueDistribution d =
        DiscreteValueDistribution::normalized(atoms, weights, 1.0);
    CHECK(d.shift_plus_eps(0.0).approx_equal(d, 1e-12));
    const double eps = rng.uniform(0.0, 0.3);
    const auto s = d.shift_plus_eps(eps);
    // target CDF away from the clamp region, dominance everywhere
    for (double z = -0.05; z <= 1.05; z += 0.013) {
      CHECK(s.cdf(z) >= d.cdf(z) - 1e-12);
      if (z >= eps) {
        CHECK(s.cdf(z) ==
              doctest::Approx(std::min(d.cdf(z + eps) + eps, 1.0)).epsilon(1e-12));
      }
    }
    CHECK(cvl::levy_distance(d, s) <= 2.0 * eps + 1e-9);
  }
}

TEST_CASE("sampling matches weights") {
  const auto p = DiscreteValueDistribution::point_mass(0.7, 1.0);
  cvl::Rng rng(3);
  CHECK(p.sample(rng) == 0.7);

  const DiscreteValueDistribution coin({0.0, 1.0}, {0.5, 0.5}, 1.0);
  cvl::Rng a(1), b(1);
  int ones = 0;
  for (int t = 0; t < 100000; ++t) {
    const double x = coin.sample(a);
    CHECK(x == coin.sample(b));  // same seed, same stream
    if (x == 1.0) ++ones;
  }
  CHECK(std::abs(ones / 100000.0 - 0.5) < 0.01);
}

TEST_CASE("normalized load warns on drifted weights") {
  bool warned = false;
  const auto d = DiscreteValueDistribution::normalized({0.2, 0.8}, {0.6, 0.6}, 1.0, &warned);
  CHECK(warned);
  CHECK(d.weights()[0] == doctest::Approx(0.5).epsilon(1e-12));
  warned = false;
  DiscreteValueDistribution::normalized({0.2}, {1.0 + 1e-12}, 1.0, &warned);
  CHECK_FALSE(warned);
}
