#include <cmath>
#include <vector>

#include "doctest.h"

#include "cvl/policies.hpp"

using namespace cvl;

namespace {

DiscreteValueDistribution pm(double a) { return DiscreteValueDistribution::point_mass(a, 1.0); }

DiscreteValueDistribution two(double a, double b) {
  return DiscreteValueDistribution({a, b}, {0.5, 0.5}, 1.0);
}

}  // namespace

TEST_CASE("revenue") {
  CHECK(revenue(pm(0.7), 0.7) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(revenue(two(0.4, 0.8), 0.8) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(revenue(two(0.4, 0.8), 0.0) == 0.0);
}

TEST_CASE("optimal price") {
  CHECK(optimal_price(pm(0.7)) == std::pair<double, double>{0.7, 0.7});
  const auto tie = optimal_price(two(0.4, 0.8));
  CHECK(tie.first == doctest::Approx(0.4).epsilon(1e-12));  // tie broken low
  CHECK(tie.second == doctest::Approx(0.4).epsilon(1e-12));
  const auto top = optimal_price(two(0.4, 1.0));
  CHECK(top.first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top.second == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fair cap") {
  CHECK(fair_cap(pm(1.0), 0.25) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(fair_cap(two(0.2, 1.0), 0.1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(fair_cap(two(0.2, 1.0), 0.7) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(fair_cap(two(0.2, 1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(fair_cap(pm(0.5), -0.1));
}

TEST_CASE("weitzman policy order") {
  {
    const PandoraInstance inst{{pm(1.0)}, {0.25}};
    const auto p = weitzman_policy(inst);
    CHECK(p.fair_caps == std::vector<double>{0.75});
    CHECK(p.visit_order == std::vector<std::size_t>{0});
  }
  {
    const PandoraInstance inst{{pm(0.5), pm(1.0)}, {0.0, 0.6}};
    const auto p = weitzman_policy(inst);
    CHECK(p.fair_caps[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.fair_caps[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p.visit_order == std::vector<std::size_t>{0, 1});
  }
  {
    const PandoraInstance inst{{pm(1.0), pm(1.0)}, {0.25, 0.25}};
    CHECK(weitzman_policy(inst).visit_order == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("pandora evaluation") {
  {
    const PandoraInstance empty;
    const auto out = evaluate_pandora(empty, PandoraPolicy{});
    CHECK(out.value == 0.0);
    CHECK(out.exact);
  }
  {
    const PandoraInstance inst{{pm(1.0)}, {0.25}};
    CHECK(evaluate_pandora(inst, weitzman_policy(inst)).value ==
          doctest::Approx(0.75).epsilon(1e-12));
  }
  {
    const PandoraInstance inst{{pm(0.5), pm(1.0)}, {0.0, 0.6}};
    CHECK(evaluate_pandora(inst, weitzman_policy(inst)).value ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("pandora monte carlo fallback") {
  PandoraInstance inst;
  for (int i = 0; i < 3; ++i) {
    inst.dists.push_back(DiscreteValueDistribution({0.1, 0.4, 0.9}, {0.3, 0.3, 0.4}, 1.0));
    inst.costs.push_back(0.05);
  }
  const auto policy = weitzman_policy(inst);
  const auto exact = evaluate_pandora(inst, policy);
  const auto mc = evaluate_pandora(inst, policy, /*exact_budget=*/1, /*mc_seed=*/5);
  CHECK(exact.exact);
  CHECK_FALSE(mc.exact);
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.value - exact.value) < 5.0 * mc.std_error + 1e-3);
}

TEST_CASE("stopping thresholds") {
  {
    const std::vector<DiscreteValueDistribution> ds{pm(0.3)};
    CHECK(stopping_thresholds(ds).thresholds == std::vector<double>{0.0});
  }
  {
    const std::vector<DiscreteValueDistribution> ds{pm(0.3), two(0.0, 1.0)};
    const auto p = stopping_thresholds(ds);
    CHECK(p.thresholds[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.thresholds[1] == 0.0);
  }
  {
    const std::vector<DiscreteValueDistribution> ds{pm(0.3), two(0.0, 1.0), two(0.0, 1.0)};
    const auto p = stopping_thresholds(ds);
    CHECK(p.thresholds[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(p.thresholds[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.thresholds[2] == 0.0);
  }
}

TEST_CASE("stopping evaluation") {
  {
    const std::vector<DiscreteValueDistribution> ds{pm(0.3)};
    CHECK(evaluate_stopping(ds, StoppingPolicy{{0.0}}) ==
          doctest::Approx(0.3).epsilon(1e-12));
  }
  const std::vector<DiscreteValueDistribution> ds{two(0.0, 1.0), two(0.0, 1.0)};
  CHECK(evaluate_stopping(ds, StoppingPolicy{{0.5, 0.0}}) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(evaluate_stopping(ds, StoppingPolicy{{1.1, 0.0}}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS(evaluate_stopping(ds, StoppingPolicy{{0.5}}));
}

TEST_CASE("deploy learned shifts then optimizes") {
  const std::vector<DiscreteValueDistribution> learned{pm(0.5)};
  {
    const auto p = deploy_learned(Problem::Revenue, learned, 0.0);
    CHECK(std::get<PricePolicy>(p).price == doctest::Approx(0.5).epsilon(1e-12));
  }
  {
    const auto p = deploy_learned(Problem::Revenue, learned, 0.1);
    CHECK(std::get<PricePolicy>(p).price == doctest::Approx(0.4).epsilon(1e-12));
  }
  {
    const std::vector<DiscreteValueDistribution> ds{pm(0.3), two(0.0, 1.0)};
    const auto p = deploy_learned(Problem::Stopping, ds, 0.0);
    CHECK(std::get<StoppingPolicy>(p).thresholds == stopping_thresholds(ds).thresholds);
  }
  CHECK_THROWS(deploy_learned(Problem::Revenue, learned, -0.1));
}

TEST_CASE("strong monotonicity report") {
  const std::vector<DiscreteValueDistribution> d{two(0.2, 0.9)};
  const std::vector<DiscreteValueDistribution> same{two(0.2, 0.9)};
  const auto eq = check_strong_monotonicity(Problem::Revenue, d, same);
  CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-12));
  CHECK(eq.holds);

  const std::vector<DiscreteValueDistribution> shifted{d[0].shift_plus_eps(0.05)};
  CHECK(check_strong_monotonicity(Problem::Revenue, d, shifted).holds);

  // dominance violated: Dp sits above D
  const std::vector<DiscreteValueDistribution> higher{two(0.4, 1.0)};
  CHECK_THROWS(check_strong_monotonicity(Problem::Revenue, d, higher));
}

TEST_CASE("point-mass stopping monotonicity in closed form") {
  const double eps = 0.07;
  const std::vector<double> a{0.6, 0.4, 0.8};
  std::vector<DiscreteValueDistribution> d, dp;
  for (double v : a) {
    d.push_back(pm(v));
    dp.push_back(pm(v - eps));
  }
  const auto rep = check_strong_monotonicity(Problem::Stopping, d, dp);
  CHECK(rep.holds);
  CHECK(rep.lhs - rep.rhs >= -1e-12);
}

TEST_CASE("stability report") {
  const std::vector<DiscreteValueDistribution> d{two(0.3, 0.8)};
  const auto self = check_stability(Problem::Revenue, d, d, 2.0);
  CHECK(self.epsilon <= 1e-9);
  CHECK(self.opt_d == doctest::Approx(self.opt_dp).epsilon(1e-12));
  CHECK(self.holds);

  const std::vector<DiscreteValueDistribution> dp{d[0].shift_plus_eps(0.05)};
  CHECK(check_stability(Problem::Revenue, d, dp, 2.0).holds);

  const std::vector<DiscreteValueDistribution> p2{pm(0.6), pm(0.9)};
  std::vector<DiscreteValueDistribution> p2s;
  for (const auto& x : p2) p2s.push_back(x.shift_plus_eps(0.05));
  const std::vector<double> costs{0.1, 0.2};
  CHECK(check_stability(Problem::Pandora, p2, p2s, 8.0, &costs).holds);
}
