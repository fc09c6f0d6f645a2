#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "cvl/value_dist.hpp"

namespace cvl {

enum class Problem { Revenue, Pandora, Stopping, None };

struct PricePolicy {
  double price = 0.0;
};

// Boxes with opening costs; an empty instance is legal (reward 0).
struct PandoraInstance {
  std::vector<DiscreteValueDistribution> dists;
  std::vector<double> costs;
};

struct PandoraPolicy {
  std::vector<double> fair_caps;          // may be negative
  std::vector<std::size_t> visit_order;   // decreasing cap, ties by lower index
};

// Backward-induction acceptance levels; thresholds.back() == 0.
struct StoppingPolicy {
  std::vector<double> thresholds;
};

using PolicySpec = std::variant<PricePolicy, PandoraPolicy, StoppingPolicy>;

struct EvalOutcome {
  double value = 0.0;
  bool exact = true;
  double std_error = 0.0;  // Monte Carlo only
};

// p * Pr[r >= p]; the buyer accepts at equality.
double revenue(const DiscreteValueDistribution& d, double p);

// Maximizes revenue over the atom set; ties break toward the lowest price.
// Returns (price, expected revenue).
std::pair<double, double> optimal_price(const DiscreteValueDistribution& d);

// Solves E[max{0, r - sigma}] = opening_cost by exact segment scan. o = 0
// yields the max atom; o >= E[r] extends linearly below the min atom (the
// cap may go negative).
double fair_cap(const DiscreteValueDistribution& d, double opening_cost);

PandoraPolicy weitzman_policy(const PandoraInstance& inst);

// Executes the cap policy: open the next box in visit order while its cap
// exceeds the best observed value, stop otherwise (weak inequality stops);
// collect the best observed value minus opening costs paid. Exact
// enumeration over the outcome product when it fits in exact_budget, seeded
// Monte Carlo with reported standard error otherwise.
EvalOutcome evaluate_pandora(const PandoraInstance& inst, const PandoraPolicy& policy,
                             std::size_t exact_budget = 1000000, std::uint64_t mc_seed = 0,
                             std::size_t mc_draws = 100000);

// tau_i = E[max{tau_{i+1}, r_{i+1}}], tau_n = 0.
StoppingPolicy stopping_thresholds(std::span<const DiscreteValueDistribution> dists);

// Exact backward evaluation; acceptance at equality (r_i >= tau_i).
double evaluate_stopping(std::span<const DiscreteValueDistribution> dists,
                         const StoppingPolicy& policy);

// Applies the F^{+eps} shift to every learned distribution, then builds the
// problem's optimal policy on the shifted distributions.
PolicySpec deploy_learned(Problem problem, std::span<const DiscreteValueDistribution> learned,
                          double eps, const std::vector<double>* costs = nullptr);

PolicySpec optimal_policy(Problem problem, std::span<const DiscreteValueDistribution> dists,
                          const std::vector<double>* costs = nullptr);

EvalOutcome evaluate_policy(Problem problem, std::span<const DiscreteValueDistribution> dists,
                            const std::vector<double>* costs, const PolicySpec& policy,
                            std::size_t exact_budget = 1000000, std::uint64_t mc_seed = 0);

struct MonotonicityReport {
  double lhs = 0.0;  // reward of pi*_{D'} on D
  double rhs = 0.0;  // reward of pi*_{D'} on D'
  bool holds = false;
};

// Requires each D_i to stochastically dominate Dp_i.
MonotonicityReport check_strong_monotonicity(Problem problem,
                                             std::span<const DiscreteValueDistribution> d,
                                             std::span<const DiscreteValueDistribution> dp,
                                             const std::vector<double>* costs = nullptr);

struct StabilityReport {
  double epsilon = 0.0;  // max_i levy_distance(D_i, Dp_i)
  double opt_d = 0.0;
  double opt_dp = 0.0;
  double bound = 0.0;    // gamma * epsilon
  bool holds = false;
};

StabilityReport check_stability(Problem problem, std::span<const DiscreteValueDistribution> d,
                                std::span<const DiscreteValueDistribution> dp, double gamma,
                                const std::vector<double>* costs = nullptr);

}  // namespace cvl
