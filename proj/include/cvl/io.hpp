#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cvl/harness.hpp"

namespace cvl::io {

using nlohmann::json;

json to_json(const DiscreteValueDistribution& d);
DiscreteValueDistribution value_dist_from_json(const json& j, bool* normalize_warned = nullptr);

json to_json(const WeightDistribution& w);
WeightDistribution weight_dist_from_json(const json& j);

json to_json(const ContextDistribution& c);
ContextDistribution context_from_json(const json& j);

json to_json(const RewardFunction& f);
RewardFunction reward_from_json(const json& j);

json to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const json& j);

json to_json(const LearnerConfig& cfg);
LearnerConfig learner_config_from_json(const json& j);

json to_json(const LearnResult& result);

json to_json(const PolicySpec& policy);

json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const json& j);

std::string problem_name(Problem p);
Problem problem_from_name(const std::string& name);

// Timestamp excluded when include_timestamp is false (digests, byte
// comparisons).
json report_to_json(const EvaluationReport& report, bool include_timestamp = true);

InstanceSpec parse_instance(const std::string& path);
void write_report(const EvaluationReport& report, const std::string& path);
void write_report_csv(const EvaluationReport& report, const std::string& path);
void dump_samples(std::span<const LabeledSample> samples, const std::string& path);
std::vector<LabeledSample> load_samples(const std::string& path);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Canonical serialization (sorted keys, fixed spacing) for digests.
std::string canonical_dump(const json& j);
// FNV-1a 64-bit content digest, hex encoded.
std::string digest_hex(const std::string& bytes);

}  // namespace cvl::io
