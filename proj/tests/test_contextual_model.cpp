#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "cvl/contextual_model.hpp"

using namespace cvl;

TEST_CASE("linear reward evaluation") {
  const auto f = RewardFunction::linear(2);
  const std::vector<double> v{0.5, 0.5}, x{1.0, 1.0}, zero{0.0, 0.0};
  CHECK(f.eval(v, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.eval(v, zero) == 0.0);
  CHECK(f.c_max() == 2.0);
  CHECK(f.xi() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gate reward zeroes out an absent buyer") {
  const auto f = RewardFunction::gate();
  const std::vector<double> v{1.0, 0.8}, x{1.0, 0.3};
  CHECK(f.eval(v, x) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(f.convex());
}

TEST_CASE("clamping is counted") {
  const auto f = RewardFunction::max_affine(
      1, {RewardFunction::AffinePiece{{2.0}, {0.0}, 0.5}}, 1.0, 2.0);
  f.reset_clamp_events();
  const std::vector<double> v{1.0}, x{0.0};
  CHECK(f.eval(v, x) == 1.0);  // raw 2.5, clamped
  CHECK(f.clamp_events() == 1);
}

TEST_CASE("draw_samples basics") {
  const auto f = RewardFunction::linear(1);
  const auto v = WeightDistribution::point_mass({0.4});
  const auto x = ContextDistribution::finite({{0.5}}, {1.0});
  Rng rng(5);
  CHECK(draw_samples(v, x, f, 0, rng).empty());
  const auto s = draw_samples(v, x, f, 8, rng);
  REQUIRE(s.size() == 8);
  for (const auto& e : s) {
    CHECK(e.context[0] == 0.5);
    CHECK(e.label == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("draw_samples label mean tracks the model mean") {
  const auto f = RewardFunction::linear(1);
  const auto v = WeightDistribution::uniform({{0.2}, {0.8}});
  const auto x = ContextDistribution::finite({{1.0}}, {1.0});
  Rng rng(11);
  const auto s = draw_samples(v, x, f, 10000, rng);
  double mean = 0.0;
  for (const auto& e : s) mean += e.label;
  mean /= 10000.0;
  // E = 0.5, sd = 0.3; three standard errors
  CHECK(std::abs(mean - 0.5) < 3.0 * 0.3 / 100.0);
}

TEST_CASE("draw_samples is deterministic per seed") {
  const auto f = RewardFunction::linear(2);
  const auto v = WeightDistribution::uniform({{0.2, 0.9}, {0.7, 0.1}});
  const auto x = ContextDistribution::product_uniform(2, 0.25);
  Rng a(99), b(99);
  const auto s1 = draw_samples(v, x, f, 50, a);
  const auto s2 = draw_samples(v, x, f, 50, b);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(s1[i].label == s2[i].label);
    CHECK(s1[i].context == s2[i].context);
  }
}

TEST_CASE("induced value distribution pushes atoms through f") {
  const auto f = RewardFunction::linear(1);
  const auto v = WeightDistribution(1, {{0.2}, {0.8}}, {0.5, 0.5});
  {
    const auto d = induced_value_distribution(v, f, std::vector<double>{1.0});
    REQUIRE(d.size() == 2);
    CHECK(d.atoms()[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.atoms()[1] == doctest::Approx(0.8).epsilon(1e-12));
  }
  {
    const auto d = induced_value_distribution(v, f, std::vector<double>{0.0});
    REQUIRE(d.size() == 1);
    CHECK(d.atoms()[0] == 0.0);
    CHECK(d.weights()[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    const auto d = induced_value_distribution(v, f, std::vector<double>{0.5});
    REQUIRE(d.size() == 2);
    CHECK(d.atoms()[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.atoms()[1] == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("induced distribution matches sampled labels at a fixed context") {
  const auto f = RewardFunction::linear(2);
  const auto v = WeightDistribution::uniform({{0.2, 0.9}, {0.7, 0.1}, {0.4, 0.4}});
  const std::vector<double> ctx{0.75, 0.5};
  const auto x = ContextDistribution::finite({ctx}, {1.0});
  const auto induced = induced_value_distribution(v, f, ctx);
  Rng rng(21);
  const auto samples = draw_samples(v, x, f, 100000, rng);
  std::vector<double> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  std::sort(labels.begin(), labels.end());
  // two-sample KS statistic between empirical labels and the exact CDF
  double ks = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    // compare only at the last index of each tied block (Pr[label <= v])
    if (i + 1 < labels.size() && labels[i + 1] == labels[i]) continue;
    const double emp = static_cast<double>(i + 1) / static_cast<double>(labels.size());
    ks = std::max(ks, std::abs(emp - induced.cdf(labels[i])));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("lipschitz certification") {
  Rng rng(31);
  const auto lin = certify_lipschitz(RewardFunction::linear(2), 2000, rng);
  CHECK(lin.max_ratio_v <= std::sqrt(2.0) + 1e-9);
  CHECK_FALSE(lin.xi_exceeded);
  CHECK_FALSE(lin.nonconvex_kind);

  const auto gate = certify_lipschitz(RewardFunction::gate(), 500, rng);
  CHECK(gate.nonconvex_kind);
}
