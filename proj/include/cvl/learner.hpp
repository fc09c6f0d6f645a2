#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cvl/surrogate_loss.hpp"

namespace cvl {

struct LearnerConfig {
  enum class Step { Constant, InvSqrt };

  std::size_t k = 8;           // support size of the hypothesis
  double epsilon = 0.25;       // cap-grid step, reused as the accuracy knob
  std::size_t iterations = 400;
  Step step_schedule = Step::InvSqrt;
  std::optional<double> eta0;  // default: B/rho (InvSqrt), B/(rho*sqrt(T)) (Constant)
  std::uint64_t seed = 0;
  std::optional<double> lambda_override;
  bool average_iterates = false;  // return the running average instead of the best iterate
};

struct LearnResult {
  WeightDistribution learned;
  std::vector<std::pair<std::size_t, double>> objective_trajectory;
  double lambda_used = 0.0;
  double rho_used = 0.0;
  double best_objective = 0.0;
};

// Lipschitz bound of the capped squared loss on uniform k-support
// distributions: 2 * c_max^2 * xi / (epsilon * sqrt(k)).
double lipschitz_bound(double c_max, double epsilon, double xi, std::size_t k);

// Regularizer weight sqrt(2 * rho^2 / (B^2 * m)).
double regularization_lambda(double rho, double B, std::size_t m);

// Sample-size calculators. The loss form is 32 * d * xi^2 * c_max^4 /
// (eps^4 * delta^2); the capped and Levy forms compose it with the accuracy
// substitutions eps -> eps^2 and eps -> eps^4 / 2.
std::uint64_t required_samples_loss(std::size_t d, double xi, double c_max, double epsilon,
                                    double delta);
std::uint64_t required_samples_capped(std::size_t d, double xi, double c_max, double epsilon,
                                      double delta);
std::uint64_t required_samples_levy(std::size_t d, double xi, double c_max, double epsilon,
                                    double delta);

// Support-size bound 2 * (c_max^3 / eps^2) * (d ln(d c_max) + (d+1) ln(2/eps)),
// ceiled, minimum 1. Astronomically conservative at small eps; used as a
// heuristic only.
std::uint64_t support_size_heuristic(std::size_t d, double c_max, double epsilon);

// Projected subgradient descent on empirical_loss + lambda * ||V||_2^2 over
// atom coordinates in [0,1]^{k*d}, uniform weights fixed at 1/k.
LearnResult learn(std::span<const LabeledSample> samples, const RewardFunction& f,
                  const LearnerConfig& cfg);

}  // namespace cvl
