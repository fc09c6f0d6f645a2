#include <cmath>
#include <vector>

#include "doctest.h"

#include "cvl/learner.hpp"

using namespace cvl;

TEST_CASE("lipschitz bound") {
  CHECK(lipschitz_bound(1.0, 0.5, 1.0, 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lipschitz_bound(1.0, 1.0, 1.0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lipschitz_bound(2.0, 0.5, 1.0, 4) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK_THROWS(lipschitz_bound(0.0, 0.5, 1.0, 4));
}

TEST_CASE("regularization lambda") {
  CHECK(regularization_lambda(1.0, 2.0, 8) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(regularization_lambda(0.0, 2.0, 8) == 0.0);
  CHECK(regularization_lambda(2.0, 1.0, 32) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS(regularization_lambda(1.0, 2.0, 0));
}

TEST_CASE("sample-size calculators") {
  CHECK(required_samples_loss(1, 1.0, 1.0, 0.5, 0.5) == 2048);
  CHECK(required_samples_loss(1, 1.0, 1.0, 1.0, 1.0) == 32);
  CHECK(required_samples_loss(2, 1.0, 1.0, 1.0, 1.0) == 64);
  CHECK(required_samples_capped(1, 1.0, 1.0, 1.0, 1.0) == 32);
  CHECK(required_samples_levy(1, 1.0, 1.0, 1.0, 1.0) == 512);
  // monotone decreasing in accuracy and confidence
  CHECK(required_samples_capped(1, 1.0, 1.0, 0.5, 1.0) >=
        required_samples_capped(1, 1.0, 1.0, 1.0, 1.0));
  CHECK(required_samples_levy(1, 1.0, 1.0, 1.0, 0.5) >=
        required_samples_levy(1, 1.0, 1.0, 1.0, 1.0));
}

TEST_CASE("support size heuristic") {
  CHECK(support_size_heuristic(1, 1.0, 0.5) == 23);
  CHECK(support_size_heuristic(1, 1.0, 2.0) == 1);
  CHECK(support_size_heuristic(2, 1.0, 0.5) == 45);
}

namespace {

std::vector<LabeledSample> grid_samples_from_point(double vstar, std::size_t m, Rng& rng) {
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = (1.0 + static_cast<double>(rng.pick_index(4))) / 4.0;
    out.push_back({{x}, vstar * x});
  }
  return out;
}

}  // namespace

TEST_CASE("one-atom recovery") {
  Rng rng(3);
  const auto samples = grid_samples_from_point(0.6, 400, rng);
  LearnerConfig cfg;
  cfg.k = 1;
  cfg.epsilon = 0.25;
  cfg.iterations = 500;
  cfg.seed = 7;
  cfg.lambda_override = 0.0;  // pure ERM: the minimizer is exactly v*
  const auto res = learn(samples, RewardFunction::linear(1), cfg);
  REQUIRE(res.learned.size() == 1);
  CHECK(std::abs(res.learned.atoms()[0][0] - 0.6) < 0.05);
  CHECK_FALSE(res.objective_trajectory.empty());
}

TEST_CASE("single-sample quadratic pulls the atom to the label") {
  std::vector<LabeledSample> s{{{1.0}, 0.3}};
  LearnerConfig cfg;
  cfg.k = 1;
  cfg.epsilon = 1.0;  // grid {0}: loss is (v - 0.3)^2
  cfg.iterations = 2000;
  cfg.lambda_override = 0.0;
  cfg.seed = 5;
  const auto res = learn(s, RewardFunction::linear(1), cfg);
  CHECK(std::abs(res.learned.atoms()[0][0] - 0.3) < 0.01);
}

TEST_CASE("best objective never worsens with more iterations") {
  Rng rng(9);
  const auto samples = grid_samples_from_point(0.4, 60, rng);
  LearnerConfig cfg;
  cfg.k = 3;
  cfg.epsilon = 0.5;
  cfg.seed = 1;
  double prev = 1e300;
  for (std::size_t t : {10, 50, 200}) {
    cfg.iterations = t;
    const auto res = learn(samples, RewardFunction::linear(1), cfg);
    CHECK(res.best_objective <= prev + 1e-12);
    prev = res.best_objective;
    // best objective matches the minimum of the recorded trajectory
    double traj_min = 1e300;
    for (const auto& [it, obj] : res.objective_trajectory) traj_min = std::min(traj_min, obj);
    CHECK(res.best_objective == doctest::Approx(traj_min).epsilon(1e-9));
  }
}

TEST_CASE("atoms stay in the box and runs are reproducible") {
  Rng rng(13);
  std::vector<LabeledSample> s;
  for (int i = 0; i < 40; ++i) {
    s.push_back({{rng.uniform01(), rng.uniform01()}, rng.uniform(0.0, 2.0)});
  }
  LearnerConfig cfg;
  cfg.k = 4;
  cfg.epsilon = 0.5;
  cfg.iterations = 150;
  cfg.seed = 77;
  const auto f = RewardFunction::linear(2);
  const auto a = learn(s, f, cfg);
  const auto b = learn(s, f, cfg);
  for (std::size_t i = 0; i < a.learned.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(a.learned.atoms()[i][j] >= 0.0);
      CHECK(a.learned.atoms()[i][j] <= 1.0);
      CHECK(a.learned.atoms()[i][j] == b.learned.atoms()[i][j]);
    }
  }
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.lambda_used ==
        doctest::Approx(regularization_lambda(a.rho_used, std::sqrt(8.0), s.size()))
            .epsilon(1e-12));
}

TEST_CASE("learn input validation") {
  LearnerConfig cfg;
  CHECK_THROWS(learn({}, RewardFunction::linear(1), cfg));
}
