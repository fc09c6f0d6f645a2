#include "cvl/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cvl::io {

namespace {

const json& require(const json& j, const char* key, const char* where) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw std::runtime_error(std::string("missing field '") + key + "' in " + where);
  }
  return *it;
}

std::vector<double> vec_from(const json& j, const char* where) {
  if (!j.is_array()) throw std::runtime_error(std::string("expected array in ") + where);
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw std::runtime_error(std::string("expected number in ") + where);
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> mat_from(const json& j, const char* where) {
  if (!j.is_array()) throw std::runtime_error(std::string("expected array in ") + where);
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (const auto& row : j) out.push_back(vec_from(row, where));
  return out;
}

}  // namespace

json to_json(const DiscreteValueDistribution& d) {
  return json{{"atoms", d.atoms()}, {"weights", d.weights()}, {"c_max", d.c_max()}};
}

DiscreteValueDistribution value_dist_from_json(const json& j, bool* normalize_warned) {
  return DiscreteValueDistribution::normalized(
      vec_from(require(j, "atoms", "value distribution"), "value distribution atoms"),
      vec_from(require(j, "weights", "value distribution"), "value distribution weights"),
      require(j, "c_max", "value distribution").get<double>(), normalize_warned);
}

json to_json(const WeightDistribution& w) {
  return json{{"dim", w.dim()}, {"atoms", w.atoms()}, {"weights", w.weights()}};
}

WeightDistribution weight_dist_from_json(const json& j) {
  return WeightDistribution(
      require(j, "dim", "weight distribution").get<std::size_t>(),
      mat_from(require(j, "atoms", "weight distribution"), "weight distribution atoms"),
      vec_from(require(j, "weights", "weight distribution"), "weight distribution weights"));
}

json to_json(const ContextDistribution& c) {
  if (c.kind() == ContextDistribution::Kind::Finite) {
    return json{{"kind", "finite"}, {"atoms", c.atoms()}, {"weights", c.weights()}};
  }
  return json{{"kind", "product_uniform"}, {"dim", c.dim()}, {"step", c.step()}};
}

ContextDistribution context_from_json(const json& j) {
  const std::string kind = require(j, "kind", "context distribution").get<std::string>();
  if (kind == "finite") {
    return ContextDistribution::finite(
        mat_from(require(j, "atoms", "context distribution"), "context atoms"),
        vec_from(require(j, "weights", "context distribution"), "context weights"));
  }
  if (kind == "product_uniform") {
    return ContextDistribution::product_uniform(
        require(j, "dim", "context distribution").get<std::size_t>(),
        require(j, "step", "context distribution").get<double>());
  }
  throw std::runtime_error("unknown context distribution kind '" + kind + "'");
}

json to_json(const RewardFunction& f) {
  switch (f.kind()) {
    case RewardFunction::Kind::Linear:
      return json{{"kind", "linear"}, {"dim", f.dim()}};
    case RewardFunction::Kind::Gate:
      return json{{"kind", "gate"}};
    case RewardFunction::Kind::MaxAffine: {
      json pieces = json::array();
      for (const auto& p : f.pieces()) {
        pieces.push_back(json{{"a", p.a}, {"b_ctx", p.b_ctx}, {"b0", p.b0}});
      }
      return json{{"kind", "max_affine"},
                  {"dim", f.dim()},
                  {"pieces", pieces},
                  {"c_max", f.c_max()},
                  {"xi", f.xi()}};
    }
  }
  throw std::runtime_error("unknown reward kind");
}

RewardFunction reward_from_json(const json& j) {
  const std::string kind = require(j, "kind", "reward function").get<std::string>();
  if (kind == "linear") {
    return RewardFunction::linear(require(j, "dim", "reward function").get<std::size_t>());
  }
  if (kind == "gate") return RewardFunction::gate();
  if (kind == "max_affine") {
    std::vector<RewardFunction::AffinePiece> pieces;
    for (const auto& p : require(j, "pieces", "reward function")) {
      pieces.push_back(RewardFunction::AffinePiece{
          vec_from(require(p, "a", "max_affine piece"), "max_affine piece a"),
          vec_from(require(p, "b_ctx", "max_affine piece"), "max_affine piece b_ctx"),
          require(p, "b0", "max_affine piece").get<double>()});
    }
    return RewardFunction::max_affine(require(j, "dim", "reward function").get<std::size_t>(),
                                      std::move(pieces),
                                      require(j, "c_max", "reward function").get<double>(),
                                      require(j, "xi", "reward function").get<double>());
  }
  throw std::runtime_error("unknown reward kind '" + kind + "'");
}

json to_json(const InstanceSpec& spec) {
  json truths = json::array();
  for (const auto& w : spec.truths) truths.push_back(to_json(w));
  return json{{"n", spec.n},
              {"context", to_json(spec.context)},
              {"reward", to_json(spec.reward)},
              {"truths", truths},
              {"seed", spec.seed}};
}

InstanceSpec instance_from_json(const json& j) {
  std::vector<WeightDistribution> truths;
  for (const auto& w : require(j, "truths", "instance")) {
    truths.push_back(weight_dist_from_json(w));
  }
  InstanceSpec spec{require(j, "n", "instance").get<std::size_t>(),
                    context_from_json(require(j, "context", "instance")),
                    reward_from_json(require(j, "reward", "instance")), std::move(truths),
                    require(j, "seed", "instance").get<std::uint64_t>()};
  if (spec.truths.size() != spec.n) {
    throw std::runtime_error("instance field 'truths' must list exactly n distributions");
  }
  const std::size_t d = spec.reward.dim();
  if (spec.context.dim() != d) {
    throw std::runtime_error("instance field 'context' dimension mismatch");
  }
  for (const auto& w : spec.truths) {
    if (w.dim() != d) throw std::runtime_error("instance field 'truths' dimension mismatch");
  }
  return spec;
}

json to_json(const LearnerConfig& cfg) {
  json j{{"k", cfg.k},
         {"epsilon", cfg.epsilon},
         {"iterations", cfg.iterations},
         {"step_schedule",
          cfg.step_schedule == LearnerConfig::Step::InvSqrt ? "inv_sqrt" : "constant"},
         {"seed", cfg.seed},
         {"average_iterates", cfg.average_iterates}};
  if (cfg.eta0) j["eta0"] = *cfg.eta0;
  if (cfg.lambda_override) j["lambda_override"] = *cfg.lambda_override;
  return j;
}

LearnerConfig learner_config_from_json(const json& j) {
  LearnerConfig cfg;
  cfg.k = require(j, "k", "learner config").get<std::size_t>();
  cfg.epsilon = require(j, "epsilon", "learner config").get<double>();
  cfg.iterations = require(j, "iterations", "learner config").get<std::size_t>();
  if (j.contains("step_schedule")) {
    const std::string s = j["step_schedule"].get<std::string>();
    if (s == "inv_sqrt") {
      cfg.step_schedule = LearnerConfig::Step::InvSqrt;
    } else if (s == "constant") {
      cfg.step_schedule = LearnerConfig::Step::Constant;
    } else {
      throw std::runtime_error("unknown step_schedule '" + s + "' in learner config");
    }
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("eta0") && !j["eta0"].is_null()) cfg.eta0 = j["eta0"].get<double>();
  if (j.contains("lambda_override") && !j["lambda_override"].is_null()) {
    cfg.lambda_override = j["lambda_override"].get<double>();
  }
  if (j.contains("average_iterates")) cfg.average_iterates = j["average_iterates"].get<bool>();
  return cfg;
}

json to_json(const LearnResult& result) {
  json trajectory = json::array();
  for (const auto& [t, obj] : result.objective_trajectory) {
    trajectory.push_back(json::array({t, obj}));
  }
  return json{{"learned", to_json(result.learned)},
              {"trajectory", trajectory},
              {"lambda", result.lambda_used},
              {"rho", result.rho_used},
              {"best_objective", result.best_objective}};
}

json to_json(const PolicySpec& policy) {
  if (const auto* price = std::get_if<PricePolicy>(&policy)) {
    return json{{"kind", "price"}, {"price", price->price}};
  }
  if (const auto* pandora = std::get_if<PandoraPolicy>(&policy)) {
    return json{{"kind", "pandora"},
                {"fair_caps", pandora->fair_caps},
                {"visit_order", pandora->visit_order}};
  }
  const auto& stopping = std::get<StoppingPolicy>(policy);
  return json{{"kind", "stopping"}, {"thresholds", stopping.thresholds}};
}

std::string problem_name(Problem p) {
  switch (p) {
    case Problem::Revenue:
      return "revenue";
    case Problem::Pandora:
      return "pandora";
    case Problem::Stopping:
      return "stopping";
    case Problem::None:
      return "none";
  }
  return "none";
}

Problem problem_from_name(const std::string& name) {
  if (name == "revenue") return Problem::Revenue;
  if (name == "pandora") return Problem::Pandora;
  if (name == "stopping") return Problem::Stopping;
  if (name == "none") return Problem::None;
  throw std::runtime_error("unknown problem '" + name + "'");
}

json to_json(const ExperimentConfig& cfg) {
  return json{{"instance", to_json(cfg.instance)},
              {"m", cfg.m},
              {"learner", to_json(cfg.learner)},
              {"problem", problem_name(cfg.problem)},
              {"costs", cfg.costs},
              {"eval_contexts", cfg.eval_contexts},
              {"deploy_eps", cfg.deploy_eps},
              {"exact_budget", cfg.exact_budget},
              {"levy_target", cfg.levy_target},
              {"seed", cfg.seed}};
}

ExperimentConfig experiment_from_json(const json& j) {
  const json& inst = require(j, "instance", "experiment config");
  ExperimentConfig cfg{
      inst.is_string() ? parse_instance(inst.get<std::string>()) : instance_from_json(inst),
      require(j, "m", "experiment config").get<std::size_t>(),
      learner_config_from_json(require(j, "learner", "experiment config")),
      Problem::None,
      {},
      require(j, "eval_contexts", "experiment config").get<std::size_t>(),
      0.0,
      1000000,
      0.1,
      0};
  if (j.contains("problem")) cfg.problem = problem_from_name(j["problem"].get<std::string>());
  if (j.contains("costs")) cfg.costs = vec_from(j["costs"], "experiment costs");
  if (j.contains("deploy_eps")) cfg.deploy_eps = j["deploy_eps"].get<double>();
  if (j.contains("exact_budget")) cfg.exact_budget = j["exact_budget"].get<std::size_t>();
  if (j.contains("levy_target")) cfg.levy_target = j["levy_target"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (cfg.m == 0) throw std::runtime_error("experiment config: m must be >= 1");
  if (cfg.eval_contexts == 0) throw std::runtime_error("experiment config: eval_contexts must be >= 1");
  if (cfg.problem == Problem::Pandora && cfg.costs.size() != cfg.instance.n) {
    throw std::runtime_error("experiment config: pandora needs one cost per distribution");
  }
  return cfg;
}

namespace {

json summary_to_json(const MetricSummary& s) {
  return json{{"mean", s.mean}, {"median", s.median}, {"p90", s.p90}};
}

}  // namespace

json report_to_json(const EvaluationReport& report, bool include_timestamp) {
  json records = json::array();
  for (const auto& rec : report.records) {
    json r{{"context", rec.context},
           {"loss_gap", rec.loss_gap},
           {"capped_gap_sup", rec.capped_gap_sup},
           {"levy", rec.levy},
           {"exact_eval", rec.exact_eval}};
    if (rec.policy_value_learned) r["policy_value_learned"] = *rec.policy_value_learned;
    if (rec.policy_value_optimal) r["policy_value_optimal"] = *rec.policy_value_optimal;
    if (rec.regret) r["regret"] = *rec.regret;
    records.push_back(std::move(r));
  }
  json learned = json::array();
  for (const auto& w : report.learned) learned.push_back(to_json(w));
  json aggregates{{"loss_gap", summary_to_json(report.loss_gap)},
                  {"capped_gap_sup", summary_to_json(report.capped_gap)},
                  {"levy", summary_to_json(report.levy)},
                  {"levy_target", report.levy_target},
                  {"frac_levy_at_most_target", report.frac_levy_at_most_target}};
  if (report.regret) aggregates["regret"] = summary_to_json(*report.regret);
  json j{{"aggregates", aggregates},
         {"per_context", records},
         {"learned", learned},
         {"provenance",
          json{{"config_digest", report.config_digest},
               {"input_digest", report.input_digest},
               {"seed", report.seed}}}};
  if (include_timestamp) j["timestamp"] = report.timestamp;
  return j;
}

InstanceSpec parse_instance(const std::string& path) { return instance_from_json(load_json_file(path)); }

void write_report(const EvaluationReport& report, const std::string& path) {
  write_text_file(path, report_to_json(report).dump(2) + "\n");
}

void write_report_csv(const EvaluationReport& report, const std::string& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "context,loss_gap,capped_gap_sup,levy,policy_value_learned,policy_value_optimal,"
         "regret,exact_eval\n";
  for (const auto& rec : report.records) {
    out << '"';
    for (std::size_t j = 0; j < rec.context.size(); ++j) {
      if (j > 0) out << ' ';
      out << rec.context[j];
    }
    out << '"' << ',' << rec.loss_gap << ',' << rec.capped_gap_sup << ',' << rec.levy << ',';
    if (rec.policy_value_learned) out << *rec.policy_value_learned;
    out << ',';
    if (rec.policy_value_optimal) out << *rec.policy_value_optimal;
    out << ',';
    if (rec.regret) out << *rec.regret;
    out << ',' << (rec.exact_eval ? 1 : 0) << '\n';
  }
  write_text_file(path, out.str());
}

void dump_samples(std::span<const LabeledSample> samples, const std::string& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  const std::size_t d = samples.empty() ? 0 : samples.front().context.size();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << '_' << (j + 1) << ',';
  out << "y\n";
  for (const auto& s : samples) {
    for (double c : s.context) out << c << ',';
    out << s.label << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<LabeledSample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open samples file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("samples file is empty: " + path);
  std::size_t columns = 1;
  for (char c : line) {
    if (c == ',') ++columns;
  }
  std::vector<LabeledSample> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error("samples row " + std::to_string(row) + ": bad number '" + field +
                                 "'");
      }
    }
    if (values.size() != columns) {
      throw std::runtime_error("samples row " + std::to_string(row) + ": expected " +
                               std::to_string(columns) + " columns, got " +
                               std::to_string(values.size()));
    }
    LabeledSample s;
    s.label = values.back();
    values.pop_back();
    s.context = std::move(values);
    samples.push_back(std::move(s));
  }
  return samples;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string canonical_dump(const json& j) { return j.dump(); }

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace cvl::io
