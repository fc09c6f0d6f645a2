#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvl/learner.hpp"
#include "cvl/policies.hpp"

namespace cvl {

struct ExperimentConfig {
  InstanceSpec instance;
  std::size_t m = 100;  // samples per distribution
  LearnerConfig learner;
  Problem problem = Problem::None;
  std::vector<double> costs;  // pandora opening costs
  std::size_t eval_contexts = 16;
  double deploy_eps = 0.0;
  std::size_t exact_budget = 1000000;
  double levy_target = 0.1;
  std::uint64_t seed = 0;
};

struct ContextRecord {
  std::vector<double> context;
  double loss_gap = 0.0;         // mean over the n distributions
  double capped_gap_sup = 0.0;   // max over the n distributions
  double levy = 0.0;             // max over the n distributions
  std::optional<double> policy_value_learned;
  std::optional<double> policy_value_optimal;
  std::optional<double> regret;
  bool exact_eval = true;
};

struct MetricSummary {
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
};

struct EvaluationReport {
  std::vector<ContextRecord> records;
  MetricSummary loss_gap;
  MetricSummary capped_gap;
  MetricSummary levy;
  std::optional<MetricSummary> regret;
  double levy_target = 0.1;
  double frac_levy_at_most_target = 0.0;
  std::string config_digest;
  std::string input_digest;
  std::uint64_t seed = 0;
  std::string timestamp;  // excluded from digests and byte comparisons
  std::vector<WeightDistribution> learned;
};

// Evaluates one fresh context: loss gap, capped-expectation gap, Levy
// distance, and (when a problem is set) the regret of the deployed policy
// against the optimum on the true induced distributions.
ContextRecord per_context_eval(std::span<const WeightDistribution> vstar,
                               std::span<const WeightDistribution> vlearned,
                               const RewardFunction& f, std::span<const double> x,
                               const CapGrid& grid, Problem problem, double deploy_eps,
                               const std::vector<double>* costs, std::size_t exact_budget);

// Full pipeline: per distribution draw m samples and learn, then evaluate on
// fresh contexts and aggregate. Deterministic per config + seed.
EvaluationReport run_pipeline(const ExperimentConfig& cfg);

MetricSummary summarize(std::vector<double> values);

}  // namespace cvl
