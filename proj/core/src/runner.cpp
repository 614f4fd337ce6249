#include "odos/runner.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "odos/version.hpp"

namespace odos {

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

struct TableRow {
  std::string label;
  double n_or_delta = 0.0;
  double utility = 0.0;
  double se = 0.0;
  double cost = 0.0;
};

void write_table(const std::string& prefix, const std::vector<TableRow>& rows) {
  std::ofstream out(prefix + ".table.csv");
  require(static_cast<bool>(out), ErrorCode::InvalidArgument,
          "cannot write " + prefix + ".table.csv");
  out << "label,n_or_delta,utility,se,cost\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.label << ',' << r.n_or_delta << ',' << r.utility << ',' << r.se << ',' << r.cost
        << '\n';
  }
}

Json estimate_json(const UtilityEstimate& est) {
  return Json{{"mean", est.mean}, {"std_error", est.std_error}, {"n_samples", est.n_samples}};
}

double expected_cardinality(const Design& design) {
  double total = 0.0;
  for (const auto& [plan, prob] : design_support(design)) {
    total += prob * static_cast<double>(plan.cardinality());
  }
  return total;
}

const Dataset& prior_data_or_empty(const RunConfig& config, std::optional<Dataset>& storage) {
  if (config.data.has_value()) return *config.data;
  storage.emplace(*config.frame);
  return *storage;
}

Json run_evaluate(const RunConfig& config, std::vector<TableRow>& table) {
  require(config.design.has_value(), ErrorCode::ValidationError,
          "evaluate needs a design block");
  std::optional<Dataset> storage;
  const Dataset& data = prior_data_or_empty(config, storage);
  const UtilityEstimate estimate =
      expected_utility_design(*config.design, *config.model, *config.utility, data, config.mc);
  Json payload;
  payload["estimate"] = estimate_json(estimate);
  double cost_mean = expected_cardinality(*config.design);
  if (config.cost.has_value()) {
    const UtilityEstimate cost = expected_cost(*config.design, *config.cost, data, config.mc);
    payload["expected_cost"] = estimate_json(cost);
    cost_mean = cost.mean;
  }
  table.push_back(
      {"design", expected_cardinality(*config.design), estimate.mean, estimate.std_error,
       cost_mean});
  return payload;
}

Json run_optimize(const RunConfig& config, std::vector<TableRow>& table,
                  const std::string& prefix) {
  require(config.search.has_value(), ErrorCode::ValidationError,
          "optimize needs a search block");
  const SearchConfig& search = *config.search;
  std::optional<Dataset> storage;
  const Dataset& data = prior_data_or_empty(config, storage);

  SearchBudget budget;
  if (search.budget_n.has_value()) {
    budget = SearchBudget::cardinality(*search.budget_n);
  } else {
    require(config.cost.has_value(), ErrorCode::ValidationError,
            "budget_cost needs a cost block");
    budget = SearchBudget::max_cost(*search.budget_cost, *config.cost);
  }
  const PlanObjective objective = [&](const MeasurementPlan& plan) {
    return expected_utility_plan(plan, *config.model, *config.utility, data, config.mc);
  };

  SearchResult result{MeasurementPlan::empty(*config.frame)};
  if (search.strategy == "design-search") {
    std::vector<Eigen::VectorXd> targets = search.targets;
    if (targets.empty()) {
      require(config.model->kind() == ModelKind::LinReg, ErrorCode::ValidationError,
              "design-search needs explicit targets for this model");
      require(search.budget_n.has_value(), ErrorCode::ValidationError,
              "design-search needs budget_n");
      targets = two_point_targets(config.model->linreg().covariates, *search.budget_n);
    }
    UnitCovariatePool pool;
    require(config.model->kind() == ModelKind::LinReg, ErrorCode::ValidationError,
            "design-search needs a linreg model");
    pool.covariates = config.model->linreg().covariates;
    pool.units.resize(static_cast<std::size_t>(pool.covariates.rows()));
    for (std::size_t i = 0; i < pool.units.size(); ++i) {
      pool.units[i] = static_cast<std::uint32_t>(i);
    }
    require(!search.variables.empty(), ErrorCode::ValidationError, "search needs variables");
    const MeasurementPlan plan = design_search_select(targets, pool, *config.frame,
                                                      search.variables.front(),
                                                      search.time_index);
    result.best = plan;
    result.best_utility = objective(plan).mean;
    result.evaluations = 1;
    result.trace.push_back({0, plan.cardinality(), result.best_utility});
  } else {
    const CandidatePool pool =
        CandidatePool::per_unit(*config.frame, search.variables, search.time_index, budget);
    if (search.strategy == "exhaustive") {
      result = exhaustive_best(pool, objective);
    } else if (search.strategy == "greedy") {
      result = greedy_augment(pool, objective);
    } else {
      result = exchange_improve(greedy_augment(pool, objective), pool, objective);
    }
  }

  {
    std::ofstream plan_out(prefix + ".plan.csv");
    require(static_cast<bool>(plan_out), ErrorCode::InvalidArgument,
            "cannot write " + prefix + ".plan.csv");
    write_plan_csv(result.best, plan_out);
  }

  Json payload;
  payload["strategy"] = search.strategy;
  payload["best_utility"] = result.best_utility;
  payload["evaluations"] = result.evaluations;
  payload["plan_cardinality"] = result.best.cardinality();
  Json plan = Json::array();
  for (const Triple& t : result.best.entries()) {
    plan.push_back({t.unit, t.variable, t.time_index});
  }
  payload["plan"] = std::move(plan);
  const double best_cost =
      config.cost.has_value() ? plan_cost(result.best, *config.cost)
                              : static_cast<double>(result.best.cardinality());
  payload["plan_cost"] = best_cost;
  Json trace = Json::array();
  for (const auto& step : result.trace) {
    trace.push_back(Json{{"iteration", step.iteration},
                         {"cardinality", step.cardinality},
                         {"utility", step.utility}});
    table.push_back({"iter-" + std::to_string(step.iteration),
                     static_cast<double>(step.cardinality), step.utility, 0.0,
                     static_cast<double>(step.cardinality)});
  }
  payload["trace"] = std::move(trace);
  if (table.empty()) {
    table.push_back({"best", static_cast<double>(result.best.cardinality()),
                     result.best_utility, 0.0, best_cost});
  }
  return payload;
}

Json run_voi(const RunConfig& config, std::vector<TableRow>& table) {
  require(config.design.has_value(), ErrorCode::ValidationError, "voi needs a design block");
  require(config.cost.has_value(), ErrorCode::ValidationError,
          "voi needs a cost block for eligibility");
  require(config.utility->is_decision_based(), ErrorCode::ValidationError,
          "voi needs a decision-based utility");
  std::optional<Dataset> storage;
  const Dataset& data = prior_data_or_empty(config, storage);
  const bool use_price = config.risk_curve.has_value() && !config.risk_curve->is_identity();

  // Random designs: support-weighted average of per-plan values.
  double value = 0.0, baseline = 0.0, var = 0.0;
  bool clamped = false;
  for (const auto& [plan, prob] : design_support(*config.design)) {
    const VoiResult r =
        use_price ? voi_price(plan, *config.model, *config.utility, *config.risk_curve, data,
                              config.mc)
                  : voi_linear(plan, *config.model, *config.utility, data, config.mc);
    value += prob * r.value;
    baseline += prob * r.baseline;
    var += prob * prob * r.std_error * r.std_error;
    clamped = clamped || r.clamped_negative;
  }
  const UtilityEstimate cost = expected_cost(*config.design, *config.cost, data, config.mc);
  const bool eligible = value > cost.mean;

  Json payload;
  payload["value"] = value;
  payload["baseline"] = baseline;
  payload["method"] = use_price ? "bisection" : "linear";
  payload["std_error"] = std::sqrt(var);
  payload["eligible"] = eligible;
  payload["margin"] = value - cost.mean;
  if (clamped) payload["clamped_negative"] = true;
  table.push_back({"voi", expected_cardinality(*config.design), value, std::sqrt(var),
                   cost.mean});
  return payload;
}

Json run_scenario(const RunConfig& config, const RunOptions& options,
                  std::vector<TableRow>& table) {
  require(config.scenario.has_value(), ErrorCode::ValidationError,
          "scenario run needs a scenario block");
  const ScenarioConfig& sc = *config.scenario;
  if (options.scenario_name.has_value()) {
    require(*options.scenario_name == sc.name, ErrorCode::ValidationError,
            "subcommand scenario '" + *options.scenario_name + "' does not match config '" +
                sc.name + "'");
  }
  ScenarioReport report;
  if (sc.name == "sample-size") {
    require(config.model->kind() == ModelKind::NormalMean, ErrorCode::ValidationError,
            "sample-size needs a normal_mean model");
    SampleSizeScenario scenario;
    scenario.model = config.model->normal_mean();
    scenario.target_variance = sc.target_variance;
    scenario.n_max = sc.n_max;
    scenario.curve_points = sc.curve_points;
    report = run_sample_size(scenario, config.mc);
  } else if (sc.name == "hierarchical") {
    require(config.model->kind() == ModelKind::NormalMean, ErrorCode::ValidationError,
            "hierarchical sizing needs a normal_mean model");
    require(config.cost.has_value(), ErrorCode::ValidationError,
            "hierarchical sizing needs a cost block");
    const auto* hier = std::get_if<HierarchicalCost>(&*config.cost);
    require(hier != nullptr, ErrorCode::ValidationError,
            "hierarchical sizing needs a hierarchical cost model");
    HierarchicalSizingScenario scenario;
    scenario.model = config.model->normal_mean();
    scenario.omega_sq = sc.omega_sq;
    scenario.shape = sc.shape;
    scenario.costs = *hier;
    scenario.budget = sc.budget;
    report = run_hierarchical_sizing(scenario, config.mc);
  } else if (sc.name == "subsample") {
    require(config.model->kind() == ModelKind::LinReg, ErrorCode::ValidationError,
            "subsample needs a linreg model");
    SubsampleScenario scenario;
    scenario.model = config.model->linreg();
    scenario.first_stage = config.data;
    scenario.n1 = sc.n1;
    scenario.strategies = sc.strategies;
    scenario.utility = config.utility;
    scenario.time_index = sc.time_index;
    scenario.design_search_targets = sc.targets;
    report = run_subsample_selection(scenario, config.mc);
  } else if (sc.name == "markov-timing") {
    require(config.model->kind() == ModelKind::TwoStateCtmc, ErrorCode::ValidationError,
            "markov-timing needs a two_state_ctmc model");
    MarkovTimingScenario scenario;
    scenario.model = config.model->ctmc();
    scenario.total_observations = sc.total_observations;
    scenario.per_unit_counts = sc.per_unit_counts;
    scenario.spacings = sc.spacings;
    scenario.utility = config.utility;
    report = run_markov_timing(scenario, config.mc);
  } else if (sc.name == "remeasurement") {
    require(config.model->kind() == ModelKind::LinReg, ErrorCode::ValidationError,
            "remeasurement needs a linreg model");
    RemeasurementScenario scenario;
    scenario.model = config.model->linreg();
    scenario.rounds = sc.rounds;
    scenario.n1 = sc.n1;
    scenario.strategy = sc.strategy;
    scenario.utility = config.utility;
    scenario.initial_data = config.data;
    report = run_remeasurement(scenario, config.mc);
  } else {
    fail(ErrorCode::ValidationError, "unknown scenario '" + sc.name + "'");
  }
  validate_report(report);

  Json payload;
  payload["scenario"] = report.name;
  Json inputs;
  for (const auto& [k, v] : report.inputs) inputs[k] = v;
  payload["inputs"] = std::move(inputs);
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back(Json{{"label", row.label},
                        {"n_or_delta", row.n_or_delta},
                        {"utility", row.utility},
                        {"std_error", row.std_error},
                        {"cost", row.cost},
                        {"plan", row.plan_summary}});
    table.push_back({row.label, row.n_or_delta, row.utility, row.std_error, row.cost});
  }
  payload["rows"] = std::move(rows);
  payload["winner"] = report.winner;
  Json summary;
  for (const auto& [k, v] : report.summary) summary[k] = v;
  payload["summary"] = std::move(summary);
  return payload;
}

}  // namespace

Json execute(Subcommand command, const RunConfig& config_in, const RunOptions& options) {
  RunConfig config = config_in;
  if (options.seed_override.has_value()) {
    config.seed = *options.seed_override;
    config.mc.seed = *options.seed_override;
  }
  require(!config.output_prefix.empty(), ErrorCode::ValidationError,
          "output_prefix must be non-empty");
  const std::filesystem::path prefix(config.output_prefix);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());

  Json report;
  const char* name = "";
  std::vector<TableRow> table;
  switch (command) {
    case Subcommand::Evaluate:
      name = "evaluate";
      report = run_evaluate(config, table);
      break;
    case Subcommand::Optimize:
      name = "optimize";
      report = run_optimize(config, table, config.output_prefix);
      break;
    case Subcommand::Voi:
      name = "voi";
      report = run_voi(config, table);
      break;
    case Subcommand::Scenario:
      name = "scenario";
      report = run_scenario(config, options, table);
      break;
  }

  Json out;
  out["command"] = name;
  out["version"] = kVersion;
  out["seed"] = config.seed;
  if (!options.no_timestamp) out["timestamp"] = iso_timestamp();
  for (auto& [key, value] : report.items()) out[key] = std::move(value);

  std::ofstream json_out(config.output_prefix + ".report.json");
  require(static_cast<bool>(json_out), ErrorCode::InvalidArgument,
          "cannot write " + config.output_prefix + ".report.json");
  json_out << out.dump(2) << '\n';
  write_table(config.output_prefix, table);
  return out;
}

int run_command(Subcommand command, const RunConfig& config, const RunOptions& options) {
  try {
    execute(command, config, options);
    return 0;
  } catch (const Error& e) {
    std::cerr << "odos: " << e.what() << '\n';
    return e.code() == ErrorCode::Infeasible ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "odos: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace odos
