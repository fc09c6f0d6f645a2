#include "cvl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "cvl/io.hpp"
#include "cvl/metrics.hpp"
#include "cvl/surrogate_loss.hpp"

namespace cvl {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

ContextRecord per_context_eval(std::span<const WeightDistribution> vstar,
                               std::span<const WeightDistribution> vlearned,
                               const RewardFunction& f, std::span<const double> x,
                               const CapGrid& grid, Problem problem, double deploy_eps,
                               const std::vector<double>* costs, std::size_t exact_budget) {
  const std::size_t n = vstar.size();
  ContextRecord rec;
  rec.context.assign(x.begin(), x.end());

  std::vector<DiscreteValueDistribution> truth;
  std::vector<DiscreteValueDistribution> learned;
  truth.reserve(n);
  learned.reserve(n);
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gap_sum += true_loss_at_context(vlearned[i], vstar[i], f, x, grid) -
               true_loss_at_context(vstar[i], vstar[i], f, x, grid);
    truth.push_back(induced_value_distribution(vstar[i], f, x));
    learned.push_back(induced_value_distribution(vlearned[i], f, x));
    rec.capped_gap_sup =
        std::max(rec.capped_gap_sup, capped_gap_sup(truth[i], learned[i], grid.epsilon));
    rec.levy = std::max(rec.levy, levy_distance(truth[i], learned[i]));
  }
  rec.loss_gap = gap_sum / static_cast<double>(n);

  if (problem != Problem::None) {
    const PolicySpec deployed = deploy_learned(problem, learned, deploy_eps, costs);
    const EvalOutcome got = evaluate_policy(problem, truth, costs, deployed, exact_budget);
    const EvalOutcome opt =
        evaluate_policy(problem, truth, costs, optimal_policy(problem, truth, costs),
                        exact_budget);
    rec.policy_value_learned = got.value;
    rec.policy_value_optimal = opt.value;
    rec.regret = opt.value - got.value;
    rec.exact_eval = got.exact && opt.exact;
  }
  return rec;
}

MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  // nearest-rank p90
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.9 * static_cast<double>(n)));
  s.p90 = values[rank == 0 ? 0 : rank - 1];
  return s;
}

EvaluationReport run_pipeline(const ExperimentConfig& cfg) {
  const InstanceSpec& inst = cfg.instance;
  const CapGrid grid = cap_grid(inst.reward.c_max(), cfg.learner.epsilon);

  Rng master(cfg.seed);
  std::vector<WeightDistribution> learned;
  learned.reserve(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) {
    Rng sample_rng = master.fork();
    const std::uint64_t learn_seed = master.next_u64();
    const auto samples =
        draw_samples(inst.truths[i], inst.context, inst.reward, cfg.m, sample_rng);
    LearnerConfig lc = cfg.learner;
    lc.seed = learn_seed;
    learned.push_back(learn(samples, inst.reward, lc).learned);
  }

  Rng context_rng = master.fork();
  EvaluationReport report;
  report.records.reserve(cfg.eval_contexts);
  const std::vector<double>* costs = cfg.costs.empty() ? nullptr : &cfg.costs;
  for (std::size_t t = 0; t < cfg.eval_contexts; ++t) {
    const std::vector<double> x = inst.context.sample(context_rng);
    report.records.push_back(per_context_eval(inst.truths, learned, inst.reward, x, grid,
                                              cfg.problem, cfg.deploy_eps, costs,
                                              cfg.exact_budget));
  }

  std::vector<double> loss_gaps, capped_gaps, levys, regrets;
  std::size_t levy_ok = 0;
  for (const auto& rec : report.records) {
    loss_gaps.push_back(rec.loss_gap);
    capped_gaps.push_back(rec.capped_gap_sup);
    levys.push_back(rec.levy);
    if (rec.regret) regrets.push_back(*rec.regret);
    if (rec.levy <= cfg.levy_target) ++levy_ok;
  }
  report.loss_gap = summarize(std::move(loss_gaps));
  report.capped_gap = summarize(std::move(capped_gaps));
  report.levy = summarize(std::move(levys));
  if (!regrets.empty()) report.regret = summarize(std::move(regrets));
  report.levy_target = cfg.levy_target;
  report.frac_levy_at_most_target =
      static_cast<double>(levy_ok) / static_cast<double>(report.records.size());
  report.seed = cfg.seed;
  report.learned = std::move(learned);
  report.config_digest = io::digest_hex(io::canonical_dump(io::to_json(cfg)));
  report.input_digest = io::digest_hex(io::canonical_dump(io::to_json(inst)));
  report.timestamp = utc_timestamp();
  return report;
}

}  // namespace cvl
