#include "cvl/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cvl/metrics.hpp"

namespace cvl {

namespace {

double simulate_pandora(const PandoraInstance& inst, const PandoraPolicy& policy,
                        std::span<const double> realized) {
  double best = 0.0;
  double paid = 0.0;
  for (std::size_t idx : policy.visit_order) {
    if (best >= policy.fair_caps[idx]) break;
    paid += inst.costs[idx];
    best = std::max(best, realized[idx]);
  }
  return best - paid;
}

void check_pandora(const PandoraInstance& inst) {
  if (inst.dists.size() != inst.costs.size()) {
    throw std::invalid_argument("pandora: dists/costs size mismatch");
  }
  for (double o : inst.costs) {
    if (o < 0.0) throw std::invalid_argument("pandora: negative opening cost");
  }
}

void check_policy(const PandoraInstance& inst, const PandoraPolicy& policy) {
  const std::size_t n = inst.dists.size();
  if (policy.fair_caps.size() != n || policy.visit_order.size() != n) {
    throw std::invalid_argument("pandora: policy size mismatch");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t idx : policy.visit_order) {
    if (idx >= n || seen[idx]) throw std::invalid_argument("pandora: visit_order not a permutation");
    seen[idx] = true;
  }
}

bool dominates(const DiscreteValueDistribution& d, const DiscreteValueDistribution& dp,
               double tol = 1e-12) {
  // F_D(z) <= F_Dp(z) everywhere; checking at the atoms of both suffices.
  for (double z : d.atoms()) {
    if (d.cdf(z) > dp.cdf(z) + tol) return false;
  }
  for (double z : dp.atoms()) {
    if (d.cdf(z) > dp.cdf(z) + tol) return false;
  }
  return true;
}

}  // namespace

double revenue(const DiscreteValueDistribution& d, double p) {
  return p * d.tail_prob(p);
}

std::pair<double, double> optimal_price(const DiscreteValueDistribution& d) {
  double best_price = d.min_atom();
  double best_rev = revenue(d, best_price);
  for (double a : d.atoms()) {
    const double r = revenue(d, a);
    if (r > best_rev) {
      best_rev = r;
      best_price = a;
    }
  }
  return {best_price, best_rev};
}

double fair_cap(const DiscreteValueDistribution& d, double opening_cost) {
  if (opening_cost < 0.0) throw std::invalid_argument("fair_cap: negative opening cost");
  if (opening_cost == 0.0) return d.max_atom();
  // g(sigma) = E[max{0, r - sigma}] = E[max{sigma, r}] - sigma is decreasing
  // piecewise linear with slope -(Pr[r <= sigma]); scan segments from the top.
  const auto& atoms = d.atoms();
  const std::size_t n = atoms.size();
  auto g = [&](double sigma) { return d.capped_expectation(sigma) - sigma; };
  for (std::size_t j = n; j-- > 0;) {
    // segment [atoms[j], next atom); g decreases at rate 1 - cdf(atoms[j])
    if (g(atoms[j]) >= opening_cost) {
      const double rate = 1.0 - d.cdf(atoms[j]);
      return atoms[j] + (g(atoms[j]) - opening_cost) / rate;
    }
  }
  // below the min atom: g(sigma) = mean - sigma
  return d.mean() - opening_cost;
}

PandoraPolicy weitzman_policy(const PandoraInstance& inst) {
  check_pandora(inst);
  PandoraPolicy policy;
  policy.fair_caps.reserve(inst.dists.size());
  for (std::size_t i = 0; i < inst.dists.size(); ++i) {
    policy.fair_caps.push_back(fair_cap(inst.dists[i], inst.costs[i]));
  }
  policy.visit_order.resize(inst.dists.size());
  std::iota(policy.visit_order.begin(), policy.visit_order.end(), 0);
  std::sort(policy.visit_order.begin(), policy.visit_order.end(),
            [&](std::size_t a, std::size_t b) {
              if (policy.fair_caps[a] != policy.fair_caps[b]) {
                return policy.fair_caps[a] > policy.fair_caps[b];
              }
              return a < b;
            });
  return policy;
}

EvalOutcome evaluate_pandora(const PandoraInstance& inst, const PandoraPolicy& policy,
                             std::size_t exact_budget, std::uint64_t mc_seed,
                             std::size_t mc_draws) {
  check_pandora(inst);
  check_policy(inst, policy);
  const std::size_t n = inst.dists.size();
  if (n == 0) return {0.0, true, 0.0};

  double outcomes = 1.0;
  for (const auto& d : inst.dists) outcomes *= static_cast<double>(d.size());
  if (outcomes <= static_cast<double>(exact_budget)) {
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> realized(n);
    double value = 0.0;
    while (true) {
      double prob = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        realized[i] = inst.dists[i].atoms()[idx[i]];
        prob *= inst.dists[i].weights()[idx[i]];
      }
      value += prob * simulate_pandora(inst, policy, realized);
      std::size_t pos = 0;
      while (pos < n && ++idx[pos] == inst.dists[pos].size()) {
        idx[pos] = 0;
        ++pos;
      }
      if (pos == n) break;
    }
    return {value, true, 0.0};
  }

  Rng rng(mc_seed);
  std::vector<double> realized(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < mc_draws; ++t) {
    for (std::size_t i = 0; i < n; ++i) realized[i] = inst.dists[i].sample(rng);
    const double r = simulate_pandora(inst, policy, realized);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / static_cast<double>(mc_draws);
  const double var = std::max(0.0, sum_sq / static_cast<double>(mc_draws) - mean * mean);
  return {mean, false, std::sqrt(var / static_cast<double>(mc_draws))};
}

StoppingPolicy stopping_thresholds(std::span<const DiscreteValueDistribution> dists) {
  if (dists.empty()) throw std::invalid_argument("stopping_thresholds: empty instance");
  const std::size_t n = dists.size();
  StoppingPolicy policy;
  policy.thresholds.assign(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) {
    policy.thresholds[i] = dists[i + 1].capped_expectation(policy.thresholds[i + 1]);
  }
  return policy;
}

double evaluate_stopping(std::span<const DiscreteValueDistribution> dists,
                         const StoppingPolicy& policy) {
  if (dists.size() != policy.thresholds.size()) {
    throw std::invalid_argument("evaluate_stopping: length mismatch");
  }
  if (dists.empty()) return 0.0;
  double continuation = 0.0;  // R^{n+1}
  for (std::size_t i = dists.size(); i-- > 0;) {
    const double tau = policy.thresholds[i];
    double r = 0.0;
    const auto& atoms = dists[i].atoms();
    const auto& weights = dists[i].weights();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      r += weights[j] * (atoms[j] >= tau ? atoms[j] : continuation);
    }
    continuation = r;
  }
  return continuation;
}

PolicySpec optimal_policy(Problem problem, std::span<const DiscreteValueDistribution> dists,
                          const std::vector<double>* costs) {
  switch (problem) {
    case Problem::Revenue: {
      if (dists.empty()) throw std::invalid_argument("optimal_policy: no distribution");
      return PricePolicy{optimal_price(dists.front()).first};
    }
    case Problem::Pandora: {
      if (costs == nullptr) throw std::invalid_argument("optimal_policy: pandora needs costs");
      PandoraInstance inst{{dists.begin(), dists.end()}, *costs};
      return weitzman_policy(inst);
    }
    case Problem::Stopping:
      return stopping_thresholds(dists);
    case Problem::None:
      break;
  }
  throw std::invalid_argument("optimal_policy: no problem selected");
}

PolicySpec deploy_learned(Problem problem, std::span<const DiscreteValueDistribution> learned,
                          double eps, const std::vector<double>* costs) {
  if (eps < 0.0) throw std::invalid_argument("deploy_learned: eps must be nonnegative");
  std::vector<DiscreteValueDistribution> shifted;
  shifted.reserve(learned.size());
  for (const auto& d : learned) shifted.push_back(d.shift_plus_eps(eps));
  return optimal_policy(problem, shifted, costs);
}

EvalOutcome evaluate_policy(Problem problem, std::span<const DiscreteValueDistribution> dists,
                            const std::vector<double>* costs, const PolicySpec& policy,
                            std::size_t exact_budget, std::uint64_t mc_seed) {
  switch (problem) {
    case Problem::Revenue:
      return {revenue(dists.front(), std::get<PricePolicy>(policy).price), true, 0.0};
    case Problem::Pandora: {
      if (costs == nullptr) throw std::invalid_argument("evaluate_policy: pandora needs costs");
      PandoraInstance inst{{dists.begin(), dists.end()}, *costs};
      return evaluate_pandora(inst, std::get<PandoraPolicy>(policy), exact_budget, mc_seed);
    }
    case Problem::Stopping:
      return {evaluate_stopping(dists, std::get<StoppingPolicy>(policy)), true, 0.0};
    case Problem::None:
      break;
  }
  throw std::invalid_argument("evaluate_policy: no problem selected");
}

MonotonicityReport check_strong_monotonicity(Problem problem,
                                             std::span<const DiscreteValueDistribution> d,
                                             std::span<const DiscreteValueDistribution> dp,
                                             const std::vector<double>* costs) {
  if (d.size() != dp.size()) {
    throw std::invalid_argument("check_strong_monotonicity: size mismatch");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!dominates(d[i], dp[i])) {
      throw std::invalid_argument("check_strong_monotonicity: dominance violated");
    }
  }
  const PolicySpec policy = optimal_policy(problem, dp, costs);
  MonotonicityReport rep;
  rep.lhs = evaluate_policy(problem, d, costs, policy).value;
  rep.rhs = evaluate_policy(problem, dp, costs, policy).value;
  rep.holds = rep.lhs >= rep.rhs - 1e-9;
  return rep;
}

StabilityReport check_stability(Problem problem, std::span<const DiscreteValueDistribution> d,
                                std::span<const DiscreteValueDistribution> dp, double gamma,
                                const std::vector<double>* costs) {
  if (d.size() != dp.size()) throw std::invalid_argument("check_stability: size mismatch");
  StabilityReport rep;
  for (std::size_t i = 0; i < d.size(); ++i) {
    rep.epsilon = std::max(rep.epsilon, levy_distance(d[i], dp[i]));
  }
  rep.opt_d = evaluate_policy(problem, d, costs, optimal_policy(problem, d, costs)).value;
  rep.opt_dp = evaluate_policy(problem, dp, costs, optimal_policy(problem, dp, costs)).value;
  rep.bound = gamma * rep.epsilon;
  rep.holds = rep.opt_d >= rep.opt_dp - rep.bound - 1e-6;
  return rep;
}

}  // namespace cvl
