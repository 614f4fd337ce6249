#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "odos/scenarios.hpp"

namespace odos {

using Json = nlohmann::ordered_json;

struct SearchConfig {
  std::string strategy;  // exhaustive | greedy | greedy+exchange | design-search
  std::optional<std::size_t> budget_n;
  std::optional<double> budget_cost;
  std::vector<std::uint32_t> variables{0};
  std::uint32_t time_index = 0;
  std::vector<Eigen::VectorXd> targets;  // design-search target points
};

// Scenario-specific knobs; the model itself comes from the model block.
struct ScenarioConfig {
  std::string name;
  // sample-size
  double target_variance = 0.0;
  std::size_t n_max = 0;
  std::vector<std::size_t> curve_points;
  // hierarchical
  std::vector<double> omega_sq;
  std::vector<std::size_t> shape;
  double budget = 0.0;
  // subsample / remeasurement
  std::size_t n1 = 0;
  std::vector<std::string> strategies;
  std::string strategy;
  std::size_t rounds = 0;
  std::uint32_t time_index = 0;
  std::vector<Eigen::VectorXd> targets;
  // markov-timing
  std::size_t total_observations = 0;
  std::vector<std::size_t> per_unit_counts;
  std::vector<double> spacings;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string output_prefix;
  std::optional<FramePtr> frame;
  std::optional<Dataset> data;  // prior data x0, hosted by the frame block
  std::optional<ModelSpec> model;
  std::optional<UtilitySpec> utility;
  std::optional<UtilityCurve> risk_curve;
  std::optional<CostModel> cost;
  std::optional<Design> design;
  std::optional<SearchConfig> search;
  std::optional<ScenarioConfig> scenario;
  MCConfig mc;
};

// Strict parser: unknown keys are rejected, every failure names the offending
// field. The seed is mandatory so every run is replayable.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_json(const Json& root);

Json emit_config(const RunConfig& config);

}  // namespace odos
