#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvl/io.hpp"
#include "cvl/selftest.hpp"

namespace {

using cvl::io::json;

std::string default_out_dir() {
  const char* env = std::getenv("CVL_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

std::string join(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

cvl::InstanceSpec make_instance(std::size_t n, std::size_t dim, std::size_t atoms,
                                std::uint64_t seed) {
  cvl::Rng rng(seed);
  std::vector<cvl::WeightDistribution> truths;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<double>> pts(atoms, std::vector<double>(dim));
    for (auto& p : pts) {
      for (double& c : p) c = rng.uniform01();
    }
    truths.push_back(cvl::WeightDistribution::uniform(std::move(pts)));
  }
  return cvl::InstanceSpec{n, cvl::ContextDistribution::product_uniform(dim, 0.25),
                           cvl::RewardFunction::linear(dim), std::move(truths), seed};
}

struct CommonOpts {
  std::string config;
  std::string out = default_out_dir();
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "configuration file (JSON)");
  if (config_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "output directory (default: $CVL_OUT_DIR or .)");
  cmd->add_option("--seed", opts.seed, "master seed override")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

cvl::ExperimentConfig load_experiment(const CommonOpts& opts) {
  auto cfg = cvl::io::experiment_from_json(cvl::io::load_json_file(opts.config));
  if (opts.seed_set) cfg.seed = opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contextual value distribution learning and policy toolkit"};
  app.require_subcommand(1);

  CommonOpts gen_opts, sample_opts, learn_opts, eval_opts, report_opts;

  auto* generate = app.add_subcommand("generate", "emit a synthetic instance");
  std::size_t gen_n = 1, gen_dim = 2, gen_atoms = 3;
  add_common(generate, gen_opts, false);
  generate->add_option("--n", gen_n, "number of hidden distributions");
  generate->add_option("--dim", gen_dim, "weight dimension");
  generate->add_option("--atoms", gen_atoms, "support size of each hidden distribution");

  auto* sample = app.add_subcommand("sample", "draw labeled samples as CSV");
  std::size_t sample_m = 100;
  add_common(sample, sample_opts, true);
  sample->add_option("--m", sample_m, "samples per distribution");

  auto* learn = app.add_subcommand("learn", "fit distributions from fresh samples");
  std::size_t learn_m = 0;
  add_common(learn, learn_opts, true);
  learn->add_option("--m", learn_m, "samples per distribution (overrides config)");

  auto* evaluate = app.add_subcommand("evaluate", "run the full pipeline and persist a report");
  std::size_t eval_m = 0;
  std::string eval_problem;
  double eval_deploy_eps = -1.0;
  std::size_t eval_budget = 0;
  add_common(evaluate, eval_opts, true);
  evaluate->add_option("--m", eval_m, "samples per distribution (overrides config)");
  evaluate->add_option("--problem", eval_problem, "revenue|pandora|stopping|none");
  evaluate->add_option("--deploy-eps", eval_deploy_eps, "deployment shift epsilon");
  evaluate->add_option("--exact-budget", eval_budget, "max outcome tuples for exact evaluation");

  auto* report = app.add_subcommand("report", "aggregate several evaluation reports");
  std::vector<std::string> report_paths;
  add_common(report, report_opts, false);
  report->add_option("reports", report_paths, "report JSON files")
      ->required()
      ->check(CLI::ExistingFile);

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const auto inst = make_instance(gen_n, gen_dim, gen_atoms, gen_opts.seed);
      const std::string path = join(gen_opts.out, "instance.json");
      cvl::io::write_text_file(path, cvl::io::to_json(inst).dump(2) + "\n");
      std::cout << path << "\n";
      return 0;
    }
    if (sample->parsed()) {
      const auto inst = cvl::io::parse_instance(sample_opts.config);
      cvl::Rng master(sample_opts.seed_set ? sample_opts.seed : inst.seed);
      for (std::size_t i = 0; i < inst.n; ++i) {
        cvl::Rng rng = master.fork();
        const auto samples =
            cvl::draw_samples(inst.truths[i], inst.context, inst.reward, sample_m, rng);
        const std::string path =
            join(sample_opts.out, "samples_" + std::to_string(i) + ".csv");
        cvl::io::dump_samples(samples, path);
        std::cout << path << "\n";
      }
      return 0;
    }
    if (learn->parsed()) {
      auto cfg = load_experiment(learn_opts);
      if (learn_m > 0) cfg.m = learn_m;
      cvl::Rng master(cfg.seed);
      json out = json::array();
      for (std::size_t i = 0; i < cfg.instance.n; ++i) {
        cvl::Rng rng = master.fork();
        const std::uint64_t learn_seed = master.next_u64();
        const auto samples = cvl::draw_samples(cfg.instance.truths[i], cfg.instance.context,
                                               cfg.instance.reward, cfg.m, rng);
        cvl::LearnerConfig lc = cfg.learner;
        lc.seed = learn_seed;
        out.push_back(cvl::io::to_json(cvl::learn(samples, cfg.instance.reward, lc)));
      }
      const std::string path = join(learn_opts.out, "learned.json");
      cvl::io::write_text_file(path, out.dump(2) + "\n");
      std::cout << path << "\n";
      return 0;
    }
    if (evaluate->parsed()) {
      auto cfg = load_experiment(eval_opts);
      if (eval_m > 0) cfg.m = eval_m;
      if (!eval_problem.empty()) cfg.problem = cvl::io::problem_from_name(eval_problem);
      if (eval_deploy_eps >= 0.0) cfg.deploy_eps = eval_deploy_eps;
      if (eval_budget > 0) cfg.exact_budget = eval_budget;
      const auto rep = cvl::run_pipeline(cfg);
      const std::string json_path = join(eval_opts.out, "report.json");
      const std::string csv_path = join(eval_opts.out, "report.csv");
      cvl::io::write_report(rep, json_path);
      cvl::io::write_report_csv(rep, csv_path);
      std::cout << json_path << "\n" << csv_path << "\n";
      return 0;
    }
    if (report->parsed()) {
      std::vector<double> loss_gaps, capped, levys, regrets;
      for (const auto& path : report_paths) {
        const json rep = cvl::io::load_json_file(path);
        for (const auto& rec : rep.at("per_context")) {
          loss_gaps.push_back(rec.at("loss_gap").get<double>());
          capped.push_back(rec.at("capped_gap_sup").get<double>());
          levys.push_back(rec.at("levy").get<double>());
          if (rec.contains("regret")) regrets.push_back(rec.at("regret").get<double>());
        }
      }
      auto summary = [](std::vector<double> v) {
        const auto s = cvl::summarize(std::move(v));
        return json{{"mean", s.mean}, {"median", s.median}, {"p90", s.p90}};
      };
      json agg{{"runs", report_paths.size()},
               {"contexts", loss_gaps.size()},
               {"loss_gap", summary(loss_gaps)},
               {"capped_gap_sup", summary(capped)},
               {"levy", summary(levys)}};
      if (!regrets.empty()) agg["regret"] = summary(regrets);
      const std::string path = join(report_opts.out, "aggregate.json");
      cvl::io::write_text_file(path, agg.dump(2) + "\n");
      std::cout << agg.dump(2) << "\n";
      return 0;
    }
    if (selftest->parsed()) {
      return cvl::run_acceptance(std::cout) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
