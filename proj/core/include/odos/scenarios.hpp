#pragma once

#include <map>
#include <optional>
#include <string>

#include "odos/search.hpp"
#include "odos/voi.hpp"

namespace odos {

struct ScenarioRow {
  std::string label;
  double n_or_delta = 0.0;
  double utility = 0.0;
  double std_error = 0.0;
  double cost = 0.0;
  std::string plan_summary;
};

struct ScenarioReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;  // echoed configuration
  std::vector<ScenarioRow> rows;
  std::string winner;
  std::uint64_t seed = 0;
  std::map<std::string, double> summary;  // scenario-specific scalars
};

// Smallest sample size whose forward-simulated average posterior variance
// meets the target, plus the variance-vs-n curve.
struct SampleSizeScenario {
  NormalMeanSpec model;
  double target_variance = 0.1;
  std::size_t n_max = 100;
  std::vector<std::size_t> curve_points;  // extra n values to tabulate
};
ScenarioReport run_sample_size(const SampleSizeScenario& scenario, const MCConfig& cfg);

// Balanced per-level sample sizes under a hierarchical cost budget, with a
// known-variance random-intercept extension of the normal-mean model.
struct HierarchicalSizingScenario {
  NormalMeanSpec model;
  std::vector<double> omega_sq;       // cluster-effect variance per level 2..K
  std::vector<std::size_t> shape;     // available: top clusters, children, ..., units
  HierarchicalCost costs;             // c_1..c_K (unit level first)
  double budget = 0.0;
  std::size_t enumeration_limit = 10000;
};
ScenarioReport run_hierarchical_sizing(const HierarchicalSizingScenario& scenario,
                                       const MCConfig& cfg);

// Second-stage subsample selection strategies under the shared utility.
struct SubsampleScenario {
  LinRegSpec model;
  std::optional<Dataset> first_stage;
  std::size_t n1 = 1;
  std::vector<std::string> strategies;  // srs, extreme, greedy-dopt, exchange-dopt,
                                        // exhaustive-dopt, design-search
  std::optional<UtilitySpec> utility;   // default: D-optimality
  std::uint32_t time_index = 0;
  std::vector<Eigen::VectorXd> design_search_targets;  // optional explicit targets
};
ScenarioReport run_subsample_selection(const SubsampleScenario& scenario, const MCConfig& cfg);

// Equidistant panel measurement schedules for the two-state chain under a
// total observation budget.
struct MarkovTimingScenario {
  TwoStateCtmcSpec model;
  std::size_t total_observations = 0;      // C0
  std::vector<std::size_t> per_unit_counts;  // candidate n1 values
  std::vector<double> spacings;              // candidate measurement intervals
  std::optional<UtilitySpec> utility;        // default: D-optimality
};
ScenarioReport run_markov_timing(const MarkovTimingScenario& scenario, const MCConfig& cfg);

// Sequential re-measurement: select, measure, fold in, repeat.
struct RemeasurementScenario {
  LinRegSpec model;
  std::size_t rounds = 1;
  std::size_t n1 = 1;
  std::string strategy = "greedy-dopt";  // greedy-dopt, exchange-dopt, srs, extreme
  std::optional<UtilitySpec> utility;    // default: D-optimality
  std::optional<Dataset> initial_data;
};
ScenarioReport run_remeasurement(const RemeasurementScenario& scenario, const MCConfig& cfg);

// Budget-respecting winner check used by tests and the CLI.
void validate_report(const ScenarioReport& report);

// Two-point experimental-design targets for intercept-plus-scalar regression:
// n1 points alternating between the low and high end of the single varying
// covariate column. Needs explicit targets when several columns vary.
std::vector<Eigen::VectorXd> two_point_targets(const Eigen::MatrixXd& covariates,
                                               std::size_t n1);

}  // namespace odos
