#include "cvl/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <vector>

#include "cvl/harness.hpp"
#include "cvl/io.hpp"
#include "cvl/metrics.hpp"

namespace cvl {

namespace {

DiscreteValueDistribution random_dist(Rng& rng, std::size_t max_atoms, double c_max = 1.0) {
  const std::size_t k = 1 + rng.pick_index(max_atoms);
  std::vector<double> atoms(k), weights(k);
  for (std::size_t i = 0; i < k; ++i) {
    atoms[i] = rng.uniform(0.0, c_max);
    weights[i] = rng.uniform(0.05, 1.0);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return DiscreteValueDistribution::normalized(std::move(atoms), std::move(weights), c_max);
}

WeightDistribution random_weight_dist(Rng& rng, std::size_t dim, std::size_t max_atoms,
                                      bool uniform_weights) {
  const std::size_t k = 1 + rng.pick_index(max_atoms);
  std::vector<std::vector<double>> atoms(k, std::vector<double>(dim));
  for (auto& a : atoms) {
    for (double& c : a) c = rng.uniform01();
  }
  if (uniform_weights) return WeightDistribution::uniform(std::move(atoms));
  std::vector<double> weights(k);
  double total = 0.0;
  for (double& w : weights) total += (w = rng.uniform(0.05, 1.0));
  for (double& w : weights) w /= total;
  return WeightDistribution(dim, std::move(atoms), std::move(weights));
}

// Exact integral of the step CDF over [lo, hi].
double cdf_integral(const DiscreteValueDistribution& d, double lo, double hi) {
  std::vector<double> pts{lo};
  for (double a : d.atoms()) {
    if (a > lo && a < hi) pts.push_back(a);
  }
  pts.push_back(hi);
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    area += (pts[i + 1] - pts[i]) * d.cdf(pts[i]);
  }
  return area;
}

// --- independent policy oracles -------------------------------------------

// Expected reward of a cap policy by direct recursion over outcome branches.
double oracle_pandora(const PandoraInstance& inst, const PandoraPolicy& policy,
                      std::size_t step, double best, double paid) {
  if (step == policy.visit_order.size()) return best - paid;
  const std::size_t box = policy.visit_order[step];
  if (best >= policy.fair_caps[box]) return best - paid;
  double value = 0.0;
  const auto& d = inst.dists[box];
  for (std::size_t j = 0; j < d.size(); ++j) {
    value += d.weights()[j] * oracle_pandora(inst, policy, step + 1,
                                             std::max(best, d.atoms()[j]),
                                             paid + inst.costs[box]);
  }
  return value;
}

// Expected reward of a threshold policy by enumerating full outcome tuples
// and running the stopping rule forward on each.
double oracle_stopping(std::span<const DiscreteValueDistribution> dists,
                       const StoppingPolicy& policy) {
  const std::size_t n = dists.size();
  std::vector<std::size_t> idx(n, 0);
  double value = 0.0;
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) prob *= dists[i].weights()[idx[i]];
    double reward = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = dists[i].atoms()[idx[i]];
      if (r >= policy.thresholds[i]) {
        reward = r;
        break;
      }
    }
    value += prob * reward;
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == dists[pos].size()) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return value;
}

PandoraPolicy caps_to_policy(std::vector<double> caps) {
  PandoraPolicy p;
  p.visit_order.resize(caps.size());
  std::iota(p.visit_order.begin(), p.visit_order.end(), 0);
  std::sort(p.visit_order.begin(), p.visit_order.end(), [&](std::size_t a, std::size_t b) {
    if (caps[a] != caps[b]) return caps[a] > caps[b];
    return a < b;
  });
  p.fair_caps = std::move(caps);
  return p;
}

// --- criteria --------------------------------------------------------------

bool crit_squared_identity(std::ostream& out) {
  Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const auto y = random_dist(rng, 5);
    const double z = rng.uniform(-1.0, 2.0);
    const double zp = rng.uniform(-1.0, 2.0);
    const double lhs = (z - y.mean()) * (z - y.mean()) - (zp - y.mean()) * (zp - y.mean());
    double rhs = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double a = y.atoms()[j];
      rhs += y.weights()[j] * ((z - a) * (z - a) - (zp - a) * (zp - a));
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  // the companion capped-difference form, exact as well
  for (int t = 0; t < 10000; ++t) {
    const auto d = random_dist(rng, 5);
    double z = rng.uniform(-0.5, 1.5);
    double zp = rng.uniform(-0.5, 1.5);
    if (z > zp) std::swap(z, zp);
    const double lhs = d.capped_expectation(zp) - d.capped_expectation(z);
    worst = std::max(worst, std::abs(lhs - cdf_integral(d, z, zp)));
  }
  out << "  max identity residual " << worst << "\n";
  return worst <= 1e-12;
}

bool crit_gap_decomposition(std::ostream& out) {
  Rng rng(202);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 1 + rng.pick_index(3);
    const RewardFunction f = RewardFunction::linear(d);
    const CapGrid grid = cap_grid(f.c_max(), f.c_max() * rng.uniform(0.15, 0.45));
    const auto vp = random_weight_dist(rng, d, 5, false);
    const auto vstar = random_weight_dist(rng, d, 5, false);
    std::vector<double> x(d);
    for (double& c : x) c = rng.uniform01();
    const auto terms = loss_gap_decomposition(vp, vstar, f, x, grid);
    double sum = 0.0;
    for (double v : terms) sum += v;
    const double direct = true_loss_at_context(vp, vstar, f, x, grid) -
                          true_loss_at_context(vstar, vstar, f, x, grid);
    worst = std::max(worst, std::abs(sum - direct));
  }
  out << "  max decomposition residual " << worst << "\n";
  return worst <= 1e-9;
}

bool crit_subgradient(std::ostream& out) {
  Rng rng(303);
  double worst_rel = 0.0;
  double worst_norm_excess = 0.0;
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.pick_index(3);
    const RewardFunction f = RewardFunction::linear(d);
    const double eps = f.c_max() * rng.uniform(0.2, 0.5);
    const CapGrid grid = cap_grid(f.c_max(), eps);
    const std::size_t k = 1 + rng.pick_index(4);
    std::vector<std::vector<double>> atoms(k, std::vector<double>(d));
    for (auto& a : atoms) {
      for (double& c : a) c = rng.uniform(0.05, 0.95);
    }
    const auto v = WeightDistribution::uniform(atoms);
    const std::size_t m = 1 + rng.pick_index(20);
    std::vector<LabeledSample> samples(m);
    for (auto& s : samples) {
      s.context.resize(d);
      for (double& c : s.context) c = rng.uniform01();
      s.label = rng.uniform(0.0, f.c_max());
    }
    const auto grad = loss_subgradient(v, samples, f, grid);

    double norm_sq = 0.0;
    for (const auto& g : grad) {
      for (double c : g) norm_sq += c * c;
    }
    const double rho = lipschitz_bound(f.c_max(), eps, f.xi(), k);
    worst_norm_excess = std::max(worst_norm_excess, std::sqrt(norm_sq) - rho);

    const double h = 1e-6;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        // skip coordinates whose reward sits near a cap or the clamp boundary
        bool near_kink = atoms[i][j] < 1e-5 || atoms[i][j] > 1.0 - 1e-5;
        for (const auto& s : samples) {
          double fv = 0.0;
          for (std::size_t c = 0; c < d; ++c) fv += atoms[i][c] * s.context[c];
          if (std::abs(fv - f.c_max()) < 1e-4) near_kink = true;
          for (double cap : grid.values) {
            if (std::abs(fv - cap) < 1e-4) near_kink = true;
          }
        }
        if (near_kink) continue;
        auto lo = atoms, hi = atoms;
        lo[i][j] -= h;
        hi[i][j] += h;
        const double fd = (empirical_loss(WeightDistribution::uniform(hi), samples, f, grid) -
                           empirical_loss(WeightDistribution::uniform(lo), samples, f, grid)) /
                          (2.0 * h);
        const double g = grad[i][j];
        worst_rel = std::max(worst_rel,
                             std::abs(fd - g) / std::max({1.0, std::abs(fd), std::abs(g)}));
        ++checked;
      }
    }
  }
  out << "  " << checked << " coordinates checked, max relative error " << worst_rel
      << ", max norm excess " << worst_norm_excess << "\n";
  return worst_rel <= 1e-5 && worst_norm_excess <= 1e-9 && checked > 100;
}

bool crit_levy_bridge(std::ostream& out) {
  Rng rng(404);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_dist(rng, 6);
    const auto b = random_dist(rng, 6);
    const double gap = capped_gap_sup(a, b, 1e-3);
    const double levy = levy_distance(a, b);
    worst = std::max(worst, levy - std::sqrt(2.0 * gap));
  }
  out << "  max excess over sqrt(2 gap) " << worst << "\n";
  return worst <= 1e-6;
}

bool crit_wasserstein(std::ostream& out) {
  Rng rng(404);  // same pair stream as the bridge criterion
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_dist(rng, 6);
    const auto b = random_dist(rng, 6);
    worst = std::max(worst, wasserstein_distance(a, b) - 4.0 * levy_distance(a, b));
  }
  out << "  max excess over 4 levy " << worst << "\n";
  return worst <= 1e-9;
}

bool crit_levy_oracle(std::ostream& out) {
  Rng rng(606);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_dist(rng, 6);
    const auto b = random_dist(rng, 6);
    worst = std::max(worst, std::abs(levy_distance(a, b) - levy_distance_oracle(a, b, 0.005)));
  }
  const auto d0 = DiscreteValueDistribution::point_mass(0.0, 1.0);
  const auto d3 = DiscreteValueDistribution::point_mass(0.3, 1.0);
  const DiscreteValueDistribution u01({0.0, 1.0}, {0.5, 0.5}, 1.0);
  const double hand1 = levy_distance(d0, d3);
  const double hand2 = levy_distance(d0, u01);
  out << "  max oracle deviation " << worst << ", hand values " << hand1 << " " << hand2
      << "\n";
  return worst <= 0.01 && std::abs(hand1 - 0.3) <= 1e-6 && std::abs(hand2 - 0.5) <= 1e-6;
}

bool crit_policy_oracles(std::ostream& out) {
  Rng rng(707);
  double worst_price = 0.0, worst_caps = 0.0, worst_thresh = 0.0, worst_enum = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto d = random_dist(rng, 5);
    const double best = optimal_price(d).second;
    for (int g = 0; g <= 1000; ++g) {
      worst_price = std::max(worst_price, revenue(d, g * 1e-3) - best);
    }
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.pick_index(4);
    PandoraInstance inst;
    for (std::size_t i = 0; i < n; ++i) {
      inst.dists.push_back(random_dist(rng, 5));
      inst.costs.push_back(rng.uniform(0.0, 0.5));
    }
    const auto weitzman = weitzman_policy(inst);
    const double opt = evaluate_pandora(inst, weitzman).value;
    worst_enum = std::max(worst_enum,
                          std::abs(opt - oracle_pandora(inst, weitzman, 0, 0.0, 0.0)));
    for (int r = 0; r < 1000; ++r) {
      std::vector<double> caps(n);
      for (double& c : caps) c = rng.uniform(-0.1, 1.1);
      worst_caps =
          std::max(worst_caps, evaluate_pandora(inst, caps_to_policy(caps)).value - opt);
    }
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.pick_index(4);
    std::vector<DiscreteValueDistribution> dists;
    for (std::size_t i = 0; i < n; ++i) dists.push_back(random_dist(rng, 5));
    const auto thresholds = stopping_thresholds(dists);
    const double opt = evaluate_stopping(dists, thresholds);
    worst_enum = std::max(worst_enum, std::abs(opt - oracle_stopping(dists, thresholds)));
    for (int r = 0; r < 1000; ++r) {
      StoppingPolicy random_policy;
      random_policy.thresholds.resize(n);
      for (double& tau : random_policy.thresholds) tau = rng.uniform01();
      worst_thresh = std::max(worst_thresh, evaluate_stopping(dists, random_policy) - opt);
    }
  }
  out << "  price excess " << worst_price << ", cap excess " << worst_caps
      << ", threshold excess " << worst_thresh << ", enumerator deviation " << worst_enum
      << "\n";
  return worst_price <= 1e-12 && worst_caps <= 1e-9 && worst_thresh <= 1e-9 &&
         worst_enum <= 1e-9;
}

bool crit_monotone_stable(std::ostream& out) {
  Rng rng(808);
  const double eps_grid[] = {0.01, 0.05, 0.1};
  int failures = 0;
  for (Problem problem : {Problem::Revenue, Problem::Pandora, Problem::Stopping}) {
    for (int t = 0; t < 1000; ++t) {
      const double eps = eps_grid[rng.pick_index(3)];
      const std::size_t n = problem == Problem::Revenue ? 1 : 1 + rng.pick_index(3);
      std::vector<DiscreteValueDistribution> d, dp;
      std::vector<double> costs;
      for (std::size_t i = 0; i < n; ++i) {
        d.push_back(random_dist(rng, 4));
        dp.push_back(d.back().shift_plus_eps(eps));
        costs.push_back(rng.uniform(0.0, 0.5));
      }
      const auto* cost_ptr = problem == Problem::Pandora ? &costs : nullptr;
      if (!check_strong_monotonicity(problem, d, dp, cost_ptr).holds) ++failures;
      const double gamma = problem == Problem::Revenue ? 2.0
                           : problem == Problem::Pandora
                               ? 4.0 * static_cast<double>(n)
                               : 8.0 * static_cast<double>(n);
      if (!check_stability(problem, d, dp, gamma, cost_ptr).holds) ++failures;
    }
  }
  out << "  " << failures << " violations in 6000 checks\n";
  return failures == 0;
}

bool crit_transfer_bounds(std::ostream& out) {
  Rng rng(909);
  double worst_stop = 0.0, worst_cap = 0.0, worst_cost = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.pick_index(3);
    std::vector<DiscreteValueDistribution> d, dp;
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d.push_back(random_dist(rng, 4));
      dp.push_back(random_dist(rng, 4));
      eps = std::max(eps, capped_gap_sup(d.back(), dp.back(), 1e-3));
    }
    const double n_eps = static_cast<double>(n) * eps;
    const double cross = evaluate_stopping(d, stopping_thresholds(dp));
    const double own_dp = evaluate_stopping(dp, stopping_thresholds(dp));
    const double own_d = evaluate_stopping(d, stopping_thresholds(d));
    worst_stop = std::max(worst_stop, own_dp - cross - n_eps);
    worst_stop = std::max(worst_stop, own_d - own_dp - n_eps);
  }
  for (int t = 0; t < 500; ++t) {
    const auto d = random_dist(rng, 4);
    const auto dp = random_dist(rng, 4);
    const double eps = capped_gap_sup(d, dp, 1e-3);
    const double o = rng.uniform(0.01, 0.9);
    const double sigma = fair_cap(dp, o);
    const double paid = d.capped_expectation(sigma) - sigma;  // E_D[max{0, r - sigma}]
    worst_cap = std::max(worst_cap, std::abs(paid - o) - eps);
  }
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.pick_index(3);
    PandoraInstance inst, perturbed;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inst.dists.push_back(random_dist(rng, 4));
      perturbed.dists.push_back(inst.dists.back());
      const double o = rng.uniform(0.0, 0.4);
      const double op = std::max(0.0, o + rng.uniform(-0.1, 0.1));
      inst.costs.push_back(o);
      perturbed.costs.push_back(op);
      delta += std::abs(o - op);
    }
    const double base = evaluate_pandora(inst, weitzman_policy(inst)).value;
    const double moved = evaluate_pandora(perturbed, weitzman_policy(perturbed)).value;
    worst_cost = std::max(worst_cost, base - moved - delta);
  }
  out << "  stopping excess " << worst_stop << ", fair-cap excess " << worst_cap
      << ", cost-shift excess " << worst_cost << "\n";
  return worst_stop <= 1e-6 && worst_cap <= 1e-6 && worst_cost <= 1e-9;
}

ExperimentConfig trend_config(std::size_t m, std::uint64_t seed) {
  std::vector<std::vector<double>> truth_atoms{{0.1, 0.2}, {0.5, 0.7}, {0.9, 0.4}};
  std::vector<std::vector<double>> contexts;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      contexts.push_back({i / 3.0, j / 3.0});
    }
  }
  const std::vector<double> ctx_weights(16, 1.0 / 16.0);
  InstanceSpec inst{1, ContextDistribution::finite(contexts, ctx_weights),
                    RewardFunction::linear(2),
                    {WeightDistribution::uniform(truth_atoms)},
                    seed};
  LearnerConfig lc;
  lc.k = 8;
  lc.epsilon = 0.25;
  lc.iterations = 300;
  return ExperimentConfig{std::move(inst), m, lc, Problem::None, {}, 16, 0.0, 1000000, 0.1,
                          seed};
}

bool crit_learning_trend(std::ostream& out) {
  std::vector<double> gap_small, gap_large, levy_small, levy_large;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto small = run_pipeline(trend_config(100, seed));
    const auto large = run_pipeline(trend_config(5000, seed));
    gap_small.push_back(small.loss_gap.mean);
    gap_large.push_back(large.loss_gap.mean);
    levy_small.push_back(small.levy.mean);
    levy_large.push_back(large.levy.mean);
  }
  const double g100 = summarize(gap_small).median;
  const double g5000 = summarize(gap_large).median;
  const double l100 = summarize(levy_small).median;
  const double l5000 = summarize(levy_large).median;

  const auto cfg = trend_config(100, 1);
  const CapGrid grid = cap_grid(cfg.instance.reward.c_max(), cfg.learner.epsilon);
  double planted = 0.0;
  for (const auto& x : cfg.instance.context.atoms()) {
    const auto rec = per_context_eval(cfg.instance.truths, cfg.instance.truths,
                                      cfg.instance.reward, x, grid, Problem::None, 0.0,
                                      nullptr, 1000000);
    planted = std::max({planted, rec.loss_gap, rec.capped_gap_sup, rec.levy});
  }
  out << "  median loss gap " << g100 << " -> " << g5000 << ", median levy " << l100
      << " -> " << l5000 << ", planted-truth max gap " << planted << "\n";
  return g5000 < g100 && l5000 < l100 && planted <= 1e-12;
}

bool crit_calculators(std::ostream& out) {
  bool ok = required_samples_loss(1, 1.0, 1.0, 0.5, 0.5) == 2048 &&
            required_samples_loss(1, 1.0, 1.0, 1.0, 1.0) == 32 &&
            required_samples_capped(1, 1.0, 1.0, 1.0, 1.0) == 32 &&
            required_samples_levy(1, 1.0, 1.0, 1.0, 1.0) == 512;
  const double grid[] = {0.25, 0.5, 0.75, 1.0};
  for (double delta : grid) {
    std::uint64_t prev = required_samples_loss(2, 1.0, 1.0, grid[0], delta);
    for (double eps : {0.5, 0.75, 1.0}) {
      const std::uint64_t cur = required_samples_loss(2, 1.0, 1.0, eps, delta);
      if (cur > prev) ok = false;
      prev = cur;
    }
  }
  for (double eps : grid) {
    std::uint64_t prev = required_samples_loss(2, 1.0, 1.0, eps, grid[0]);
    for (double delta : {0.5, 0.75, 1.0}) {
      const std::uint64_t cur = required_samples_loss(2, 1.0, 1.0, eps, delta);
      if (cur > prev) ok = false;
      prev = cur;
    }
  }
  out << "  frozen values and grid monotonicity " << (ok ? "verified" : "violated") << "\n";
  return ok;
}

bool crit_determinism(std::ostream& out) {
  auto cfg = trend_config(50, 42);
  cfg.problem = Problem::Revenue;
  cfg.eval_contexts = 4;
  const std::string a = io::canonical_dump(io::report_to_json(run_pipeline(cfg), false));
  const std::string b = io::canonical_dump(io::report_to_json(run_pipeline(cfg), false));
  out << "  report digests " << io::digest_hex(a) << " / " << io::digest_hex(b) << "\n";
  return a == b;
}

struct Criterion {
  const char* name;
  bool (*fn)(std::ostream&);
};

}  // namespace

int run_acceptance(std::ostream& out) {
  const Criterion criteria[] = {
      {"squared-difference identity", crit_squared_identity},
      {"loss-gap decomposition", crit_gap_decomposition},
      {"subgradient vs finite differences", crit_subgradient},
      {"levy bounded by capped gaps", crit_levy_bridge},
      {"wasserstein bounded by levy", crit_wasserstein},
      {"levy oracle agreement", crit_levy_oracle},
      {"policy optimality oracles", crit_policy_oracles},
      {"monotonicity and stability", crit_monotone_stable},
      {"reward transfer bounds", crit_transfer_bounds},
      {"learning improves with sample size", crit_learning_trend},
      {"sample-size calculators", crit_calculators},
      {"pipeline determinism", crit_determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    std::ostringstream detail;
    detail << std::setprecision(6);
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail << "  exception: " << e.what() << "\n";
    }
    out << "[" << std::setw(2) << index << "/12] " << c.name << ": "
        << (ok ? "PASS" : "FAIL") << "\n"
        << detail.str();
    if (!ok) ++failures;
  }
  out << (failures == 0 ? "all criteria passed" : "criteria failed") << " (" << (12 - failures)
      << "/12)\n";
  return failures;
}

}  // namespace cvl
