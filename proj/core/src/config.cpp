#include "odos/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace odos {

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& message) {
  fail(ErrorCode::ValidationError, path + ": " + message);
}

void check_keys(const Json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad_field(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) bad_field(path, "unknown key '" + key + "'");
  }
}

const Json& get_required(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad_field(path, "missing required key '" + std::string(key) + "'");
  return *it;
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) bad_field(path, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned()) bad_field(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) bad_field(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_double_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) bad_field(path, "expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_double(x, path));
  return out;
}

std::vector<std::size_t> as_count_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) bad_field(path, "expected an array");
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_count(x, path));
  return out;
}

Eigen::VectorXd as_vector(const Json& v, const std::string& path) {
  const auto values = as_double_vector(v, path);
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd as_matrix(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) bad_field(path, "expected a non-empty array of rows");
  const std::size_t cols = v.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row = as_double_vector(v[static_cast<Json::size_type>(i)], path);
    if (row.size() != cols) bad_field(path, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return m;
}

Triple as_triple(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) bad_field(path, "expected [unit, variable, time_index]");
  Triple t;
  t.unit = static_cast<std::uint32_t>(as_count(v[0], path));
  t.variable = static_cast<std::uint32_t>(as_count(v[1], path));
  t.time_index = static_cast<std::uint32_t>(as_count(v[2], path));
  return t;
}

std::vector<Triple> as_triples(const Json& v, const std::string& path) {
  if (!v.is_array()) bad_field(path, "expected an array of triples");
  std::vector<Triple> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_triple(x, path));
  return out;
}

FramePtr parse_frame(const Json& obj, std::optional<Dataset>& data) {
  const std::string path = "frame";
  check_keys(obj, path, {"n_units", "n_variables", "time_grid", "hierarchy", "inadmissible",
                         "data", "data_csv"});
  const std::size_t n_units = as_count(get_required(obj, path, "n_units"), path + ".n_units");
  const std::size_t n_variables =
      as_count(get_required(obj, path, "n_variables"), path + ".n_variables");
  const std::vector<double> grid =
      as_double_vector(get_required(obj, path, "time_grid"), path + ".time_grid");
  std::optional<Hierarchy> hierarchy;
  if (obj.contains("hierarchy")) {
    const Json& h = obj["hierarchy"];
    check_keys(h, path + ".hierarchy", {"memberships"});
    const Json& ms = get_required(h, path + ".hierarchy", "memberships");
    if (!ms.is_array()) bad_field(path + ".hierarchy.memberships", "expected an array");
    std::vector<std::vector<std::size_t>> memberships;
    for (const auto& level : ms) {
      memberships.push_back(as_count_vector(level, path + ".hierarchy.memberships"));
    }
    hierarchy.emplace(n_units, std::move(memberships));
  }
  std::vector<Triple> inadmissible;
  if (obj.contains("inadmissible")) {
    inadmissible = as_triples(obj["inadmissible"], path + ".inadmissible");
  }
  FramePtr frame;
  try {
    frame = make_frame(n_units, n_variables, grid, std::move(hierarchy),
                       std::move(inadmissible));
  } catch (const Error& e) {
    bad_field(path, e.what());
  }
  if (obj.contains("data") && obj.contains("data_csv")) {
    bad_field(path, "give either data or data_csv, not both");
  }
  if (obj.contains("data")) {
    const Json& rows = obj["data"];
    if (!rows.is_array()) bad_field(path + ".data", "expected an array of rows");
    std::map<Triple, double> values;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 4) {
        bad_field(path + ".data", "expected [unit, variable, time_index, value]");
      }
      if (row[3].is_string()) {
        if (row[3].get<std::string>() != "NA") bad_field(path + ".data", "bad value token");
        continue;
      }
      Triple t;
      t.unit = static_cast<std::uint32_t>(as_count(row[0], path + ".data"));
      t.variable = static_cast<std::uint32_t>(as_count(row[1], path + ".data"));
      t.time_index = static_cast<std::uint32_t>(as_count(row[2], path + ".data"));
      values[t] = as_double(row[3], path + ".data");
    }
    data.emplace(frame, std::move(values));
  } else if (obj.contains("data_csv")) {
    const std::string file = as_string(obj["data_csv"], path + ".data_csv");
    std::ifstream in(file);
    if (!in) bad_field(path + ".data_csv", "cannot open '" + file + "'");
    data.emplace(read_dataset_csv(frame, in));
  }
  return frame;
}

GammaPrior parse_gamma(const Json& obj, const std::string& path) {
  check_keys(obj, path, {"shape", "rate"});
  GammaPrior g;
  g.shape = as_double(get_required(obj, path, "shape"), path + ".shape");
  g.rate = as_double(get_required(obj, path, "rate"), path + ".rate");
  return g;
}

ModelSpec parse_model(const Json& obj) {
  const std::string path = "model";
  const std::string type = as_string(get_required(obj, path, "type"), path + ".type");
  try {
    if (type == "normal_mean") {
      check_keys(obj, path, {"type", "noise_variance", "prior_mean", "prior_variance"});
      NormalMeanSpec spec;
      spec.noise_variance =
          as_double(get_required(obj, path, "noise_variance"), path + ".noise_variance");
      spec.prior_mean = as_double(get_required(obj, path, "prior_mean"), path + ".prior_mean");
      spec.prior_variance =
          as_double(get_required(obj, path, "prior_variance"), path + ".prior_variance");
      return ModelSpec(spec);
    }
    if (type == "linreg") {
      check_keys(obj, path, {"type", "noise_variance", "prior_mean", "prior_cov", "covariates",
                             "outcome_variable"});
      LinRegSpec spec;
      spec.noise_variance =
          as_double(get_required(obj, path, "noise_variance"), path + ".noise_variance");
      spec.prior_mean = as_vector(get_required(obj, path, "prior_mean"), path + ".prior_mean");
      spec.prior_cov = as_matrix(get_required(obj, path, "prior_cov"), path + ".prior_cov");
      spec.covariates = as_matrix(get_required(obj, path, "covariates"), path + ".covariates");
      if (obj.contains("outcome_variable")) {
        spec.outcome_variable =
            static_cast<std::uint32_t>(as_count(obj["outcome_variable"], path));
      }
      return ModelSpec(spec);
    }
    if (type == "two_state_ctmc") {
      check_keys(obj, path,
                 {"type", "lambda_prior", "mu_prior", "initial_dist", "state_variable"});
      TwoStateCtmcSpec spec;
      spec.lambda_prior =
          parse_gamma(get_required(obj, path, "lambda_prior"), path + ".lambda_prior");
      spec.mu_prior = parse_gamma(get_required(obj, path, "mu_prior"), path + ".mu_prior");
      const Eigen::VectorXd pi =
          as_vector(get_required(obj, path, "initial_dist"), path + ".initial_dist");
      if (pi.size() != 2) bad_field(path + ".initial_dist", "expected two entries");
      spec.initial_dist << pi[0], pi[1];
      if (obj.contains("state_variable")) {
        spec.state_variable = static_cast<std::uint32_t>(as_count(obj["state_variable"], path));
      }
      return ModelSpec(spec);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_field(path, e.what());
  }
  bad_field(path + ".type", "unknown model type '" + type + "'");
}

TargetFunctional parse_target(const Json& obj, const std::string& path, std::size_t dim) {
  check_keys(obj, path, {"component", "weights"});
  if (obj.contains("component") == obj.contains("weights")) {
    bad_field(path, "give exactly one of component or weights");
  }
  try {
    if (obj.contains("component")) {
      return TargetFunctional::component(as_count(obj["component"], path), dim);
    }
    Eigen::VectorXd w = as_vector(obj["weights"], path + ".weights");
    if (static_cast<std::size_t>(w.size()) != dim) {
      bad_field(path + ".weights", "dimension mismatch with model parameters");
    }
    return TargetFunctional::linear(std::move(w));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_field(path, e.what());
  }
}

UtilityCurve parse_curve(const Json& obj, const std::string& path) {
  const std::string type = as_string(get_required(obj, path, "type"), path + ".type");
  try {
    if (type == "identity") {
      check_keys(obj, path, {"type"});
      return UtilityCurve::identity();
    }
    if (type == "linear") {
      check_keys(obj, path, {"type", "intercept", "slope"});
      return UtilityCurve::linear(as_double(get_required(obj, path, "intercept"), path),
                                  as_double(get_required(obj, path, "slope"), path));
    }
    if (type == "neg_exp") {
      check_keys(obj, path, {"type", "risk_aversion"});
      return UtilityCurve::neg_exp(as_double(get_required(obj, path, "risk_aversion"), path));
    }
    if (type == "expression") {
      check_keys(obj, path, {"type", "source"});
      return UtilityCurve::expression(as_string(get_required(obj, path, "source"), path));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_field(path, e.what());
  }
  bad_field(path + ".type", "unknown curve type '" + type + "'");
}

UtilitySpec parse_utility(const Json& obj, std::size_t dim,
                          std::optional<UtilityCurve>& risk_curve) {
  const std::string path = "utility";
  const std::string type = as_string(get_required(obj, path, "type"), path + ".type");
  if (obj.contains("risk_curve")) {
    risk_curve = parse_curve(obj["risk_curve"], path + ".risk_curve");
  }
  try {
    if (type == "neg_posterior_variance") {
      check_keys(obj, path, {"type", "target", "risk_curve"});
      return UtilitySpec(
          NegPosteriorVariance{parse_target(get_required(obj, path, "target"),
                                            path + ".target", dim)});
    }
    if (type == "d_optimality") {
      check_keys(obj, path, {"type", "risk_curve"});
      return UtilitySpec(DOptimality{});
    }
    if (type == "a_optimality") {
      check_keys(obj, path, {"type", "risk_curve"});
      return UtilitySpec(AOptimality{});
    }
    if (type == "decision_quadratic") {
      check_keys(obj, path, {"type", "target", "risk_curve"});
      return UtilitySpec(DecisionQuadratic{
          parse_target(get_required(obj, path, "target"), path + ".target", dim)});
    }
    if (type == "decision_table") {
      check_keys(obj, path, {"type", "decisions", "risk_curve"});
      const Json& decisions = get_required(obj, path, "decisions");
      if (!decisions.is_array() || decisions.empty()) {
        bad_field(path + ".decisions", "expected a non-empty array");
      }
      std::vector<std::string> labels;
      std::vector<std::string> exprs;
      for (const auto& d : decisions) {
        check_keys(d, path + ".decisions[]", {"label", "value"});
        labels.push_back(as_string(get_required(d, path, "label"), path + ".decisions.label"));
        exprs.push_back(as_string(get_required(d, path, "value"), path + ".decisions.value"));
      }
      return UtilitySpec(DecisionTable::from_expressions(labels, exprs, dim));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_field(path, e.what());
  }
  bad_field(path + ".type", "unknown utility type '" + type + "'");
}

CostModel parse_cost(const Json& obj) {
  const std::string path = "cost";
  const std::string type = as_string(get_required(obj, path, "type"), path + ".type");
  try {
    if (type == "per_measurement") {
      check_keys(obj, path, {"type", "per_entry"});
      PerMeasurementCost c{as_double(get_required(obj, path, "per_entry"), path)};
      CostModel model = c;
      validate_cost_model(model);
      return model;
    }
    if (type == "hierarchical") {
      check_keys(obj, path, {"type", "level_costs"});
      HierarchicalCost c{as_double_vector(get_required(obj, path, "level_costs"), path)};
      CostModel model = c;
      validate_cost_model(model);
      return model;
    }
    if (type == "combined") {
      check_keys(obj, path, {"type", "per_entry", "level_costs"});
      CombinedCost c{{as_double(get_required(obj, path, "per_entry"), path)},
                     {as_double_vector(get_required(obj, path, "level_costs"), path)}};
      CostModel model = c;
      validate_cost_model(model);
      return model;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_field(path, e.what());
  }
  bad_field(path + ".type", "unknown cost type '" + type + "'");
}

Design parse_design(const Json& obj, const FramePtr& frame) {
  const std::string path = "design";
  const std::string type = as_string(get_required(obj, path, "type"), path + ".type");
  try {
    if (type == "deterministic") {
      check_keys(obj, path, {"type", "plan"});
      return Design::deterministic(
          MeasurementPlan(frame, as_triples(get_required(obj, path, "plan"), path + ".plan")));
    }
    if (type == "null") {
      check_keys(obj, path, {"type"});
      return Design::null_design(frame);
    }
    if (type == "simple_random_sample") {
      check_keys(obj, path, {"type", "sample_size", "variables", "time_index"});
      std::vector<std::uint32_t> variables;
      for (std::size_t v :
           as_count_vector(get_required(obj, path, "variables"), path + ".variables")) {
        variables.push_back(static_cast<std::uint32_t>(v));
      }
      return Design::simple_random_sample(
          frame, as_count(get_required(obj, path, "sample_size"), path),
          std::move(variables),
          static_cast<std::uint32_t>(as_count(get_required(obj, path, "time_index"), path)));
    }
    if (type == "weighted") {
      check_keys(obj, path, {"type", "plans"});
      const Json& plans = get_required(obj, path, "plans");
      if (!plans.is_array() || plans.empty()) bad_field(path + ".plans", "expected plans");
      std::vector<std::pair<MeasurementPlan, double>> support;
      for (const auto& p : plans) {
        check_keys(p, path + ".plans[]", {"plan", "probability"});
        support.emplace_back(
            MeasurementPlan(frame, as_triples(get_required(p, path, "plan"), path)),
            as_double(get_required(p, path, "probability"), path));
      }
      return Design::weighted(std::move(support));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad_field(path, e.what());
  }
  bad_field(path + ".type", "unknown design type '" + type + "'");
}

std::vector<Eigen::VectorXd> parse_targets(const Json& v, const std::string& path) {
  if (!v.is_array()) bad_field(path, "expected an array of points");
  std::vector<Eigen::VectorXd> out;
  for (const auto& p : v) out.push_back(as_vector(p, path));
  return out;
}

SearchConfig parse_search(const Json& obj) {
  const std::string path = "search";
  check_keys(obj, path,
             {"strategy", "budget_n", "budget_cost", "variables", "time_index", "targets"});
  SearchConfig s;
  s.strategy = as_string(get_required(obj, path, "strategy"), path + ".strategy");
  static const std::set<std::string> known{"exhaustive", "greedy", "greedy+exchange",
                                           "design-search"};
  if (known.find(s.strategy) == known.end()) {
    bad_field(path + ".strategy", "unknown strategy '" + s.strategy + "'");
  }
  if (obj.contains("budget_n") == obj.contains("budget_cost")) {
    bad_field(path, "give exactly one of budget_n or budget_cost");
  }
  if (obj.contains("budget_n")) s.budget_n = as_count(obj["budget_n"], path + ".budget_n");
  if (obj.contains("budget_cost")) {
    s.budget_cost = as_double(obj["budget_cost"], path + ".budget_cost");
  }
  if (obj.contains("variables")) {
    s.variables.clear();
    for (std::size_t v : as_count_vector(obj["variables"], path + ".variables")) {
      s.variables.push_back(static_cast<std::uint32_t>(v));
    }
  }
  if (obj.contains("time_index")) {
    s.time_index = static_cast<std::uint32_t>(as_count(obj["time_index"], path));
  }
  if (obj.contains("targets")) s.targets = parse_targets(obj["targets"], path + ".targets");
  return s;
}

ScenarioConfig parse_scenario(const Json& obj) {
  const std::string path = "scenario";
  ScenarioConfig s;
  s.name = as_string(get_required(obj, path, "name"), path + ".name");
  if (s.name == "sample-size") {
    check_keys(obj, path, {"name", "target_variance", "n_max", "curve_points"});
    s.target_variance = as_double(get_required(obj, path, "target_variance"), path);
    s.n_max = as_count(get_required(obj, path, "n_max"), path);
    if (obj.contains("curve_points")) {
      s.curve_points = as_count_vector(obj["curve_points"], path + ".curve_points");
    }
  } else if (s.name == "hierarchical") {
    check_keys(obj, path, {"name", "omega_sq", "shape", "budget"});
    s.omega_sq = as_double_vector(get_required(obj, path, "omega_sq"), path + ".omega_sq");
    s.shape = as_count_vector(get_required(obj, path, "shape"), path + ".shape");
    s.budget = as_double(get_required(obj, path, "budget"), path + ".budget");
  } else if (s.name == "subsample") {
    check_keys(obj, path, {"name", "n1", "strategies", "time_index", "targets"});
    s.n1 = as_count(get_required(obj, path, "n1"), path + ".n1");
    const Json& strategies = get_required(obj, path, "strategies");
    if (!strategies.is_array() || strategies.empty()) {
      bad_field(path + ".strategies", "expected a non-empty array");
    }
    for (const auto& st : strategies) s.strategies.push_back(as_string(st, path));
    if (obj.contains("time_index")) {
      s.time_index = static_cast<std::uint32_t>(as_count(obj["time_index"], path));
    }
    if (obj.contains("targets")) s.targets = parse_targets(obj["targets"], path + ".targets");
  } else if (s.name == "markov-timing") {
    check_keys(obj, path, {"name", "total_observations", "per_unit_counts", "spacings"});
    s.total_observations = as_count(get_required(obj, path, "total_observations"), path);
    s.per_unit_counts =
        as_count_vector(get_required(obj, path, "per_unit_counts"), path + ".per_unit_counts");
    s.spacings = as_double_vector(get_required(obj, path, "spacings"), path + ".spacings");
  } else if (s.name == "remeasurement") {
    check_keys(obj, path, {"name", "rounds", "n1", "strategy"});
    s.rounds = as_count(get_required(obj, path, "rounds"), path + ".rounds");
    s.n1 = as_count(get_required(obj, path, "n1"), path + ".n1");
    if (obj.contains("strategy")) {
      s.strategy = as_string(obj["strategy"], path + ".strategy");
    } else {
      s.strategy = "greedy-dopt";
    }
  } else {
    bad_field(path + ".name", "unknown scenario '" + s.name + "'");
  }
  return s;
}

MCConfig parse_mc(const Json& obj) {
  const std::string path = "mc";
  check_keys(obj, path, {"outer_draws", "posterior_method", "n_particles", "plan_samples"});
  MCConfig cfg;
  if (obj.contains("outer_draws")) cfg.outer_draws = as_count(obj["outer_draws"], path);
  if (obj.contains("posterior_method")) {
    const std::string method = as_string(obj["posterior_method"], path + ".posterior_method");
    if (method == "exact") {
      cfg.posterior_method = PosteriorMethod::ExactIfAvailable;
    } else if (method == "importance") {
      cfg.posterior_method = PosteriorMethod::Importance;
    } else {
      bad_field(path + ".posterior_method", "expected exact or importance");
    }
  }
  if (obj.contains("n_particles")) cfg.n_particles = as_count(obj["n_particles"], path);
  if (obj.contains("plan_samples")) cfg.plan_samples = as_count(obj["plan_samples"], path);
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  return parse_config_json(root);
}

RunConfig parse_config_json(const Json& root) {
  check_keys(root, "config",
             {"seed", "output_prefix", "frame", "model", "utility", "cost", "design", "search",
              "scenario", "mc"});
  RunConfig config;
  const Json& seed = get_required(root, "config", "seed");
  if (!seed.is_number_unsigned()) bad_field("seed", "expected a non-negative integer");
  config.seed = seed.get<std::uint64_t>();
  config.output_prefix =
      as_string(get_required(root, "config", "output_prefix"), "output_prefix");

  const int mutually_exclusive = static_cast<int>(root.contains("design")) +
                                 static_cast<int>(root.contains("search")) +
                                 static_cast<int>(root.contains("scenario"));
  if (mutually_exclusive != 1) {
    bad_field("config", "exactly one of design, search or scenario must be present");
  }

  if (root.contains("frame")) config.frame = parse_frame(root["frame"], config.data);
  config.model = parse_model(get_required(root, "config", "model"));
  if (root.contains("utility")) {
    config.utility =
        parse_utility(root["utility"], config.model->parameter_dim(), config.risk_curve);
  }
  if (root.contains("cost")) config.cost = parse_cost(root["cost"]);
  if (root.contains("design")) {
    if (!config.frame.has_value()) bad_field("design", "design needs a frame block");
    config.design = parse_design(root["design"], *config.frame);
  }
  if (root.contains("search")) config.search = parse_search(root["search"]);
  if (root.contains("scenario")) config.scenario = parse_scenario(root["scenario"]);
  if (root.contains("mc")) config.mc = parse_mc(root["mc"]);
  config.mc.seed = config.seed;
  if (!config.scenario.has_value()) {
    if (!config.frame.has_value()) bad_field("config", "frame block is required");
    if (!config.utility.has_value()) bad_field("config", "utility block is required");
  }
  return config;
}

namespace {

Json emit_triples(const std::vector<Triple>& triples) {
  Json out = Json::array();
  for (const Triple& t : triples) out.push_back({t.unit, t.variable, t.time_index});
  return out;
}

Json emit_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json emit_matrix(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(emit_vector(m.row(i).transpose()));
  return out;
}

Json emit_frame(const RunConfig& config) {
  const StudyFrame& frame = **config.frame;
  Json out;
  out["n_units"] = frame.n_units();
  out["n_variables"] = frame.n_variables();
  out["time_grid"] = frame.time_grid();
  if (frame.hierarchy().has_value()) {
    const Hierarchy& h = *frame.hierarchy();
    Json memberships = Json::array();
    for (std::size_t level = 2; level <= h.n_levels(); ++level) {
      Json m = Json::array();
      for (std::size_t u = 0; u < frame.n_units(); ++u) m.push_back(h.cluster_of(u, level));
      memberships.push_back(std::move(m));
    }
    out["hierarchy"] = Json{{"memberships", std::move(memberships)}};
  }
  std::vector<Triple> inadmissible;
  for (std::uint32_t u = 0; u < frame.n_units(); ++u) {
    for (std::uint32_t j = 0; j < frame.n_variables(); ++j) {
      for (std::uint32_t m = 0; m < frame.n_times(); ++m) {
        const Triple t{u, j, m};
        if (!frame.admissible(t)) inadmissible.push_back(t);
      }
    }
  }
  if (!inadmissible.empty()) out["inadmissible"] = emit_triples(inadmissible);
  if (config.data.has_value() && config.data->n_observed() > 0) {
    Json rows = Json::array();
    for (const auto& [t, v] : config.data->values()) {
      rows.push_back({t.unit, t.variable, t.time_index, v});
    }
    out["data"] = std::move(rows);
  }
  return out;
}

Json emit_model(const ModelSpec& model) {
  return model.visit([](const auto& spec) -> Json {
    using T = std::decay_t<decltype(spec)>;
    Json out;
    if constexpr (std::is_same_v<T, NormalMeanSpec>) {
      out["type"] = "normal_mean";
      out["noise_variance"] = spec.noise_variance;
      out["prior_mean"] = spec.prior_mean;
      out["prior_variance"] = spec.prior_variance;
    } else if constexpr (std::is_same_v<T, LinRegSpec>) {
      out["type"] = "linreg";
      out["noise_variance"] = spec.noise_variance;
      out["prior_mean"] = emit_vector(spec.prior_mean);
      out["prior_cov"] = emit_matrix(spec.prior_cov);
      out["covariates"] = emit_matrix(spec.covariates);
      out["outcome_variable"] = spec.outcome_variable;
    } else {
      out["type"] = "two_state_ctmc";
      out["lambda_prior"] = Json{{"shape", spec.lambda_prior.shape},
                                 {"rate", spec.lambda_prior.rate}};
      out["mu_prior"] = Json{{"shape", spec.mu_prior.shape}, {"rate", spec.mu_prior.rate}};
      out["initial_dist"] = Json::array({spec.initial_dist[0], spec.initial_dist[1]});
      out["state_variable"] = spec.state_variable;
    }
    return out;
  });
}

Json emit_curve(const UtilityCurve& curve) {
  Json out;
  switch (curve.kind()) {
    case UtilityCurve::Kind::Identity:
      out["type"] = "identity";
      break;
    case UtilityCurve::Kind::Linear:
      out["type"] = "linear";
      out["intercept"] = curve.intercept();
      out["slope"] = curve.slope();
      break;
    case UtilityCurve::Kind::NegExp:
      out["type"] = "neg_exp";
      out["risk_aversion"] = curve.risk_aversion();
      break;
    case UtilityCurve::Kind::Expr:
      out["type"] = "expression";
      out["source"] = curve.expr_source();
      break;
  }
  return out;
}

Json emit_utility(const UtilitySpec& utility, const std::optional<UtilityCurve>& curve) {
  Json out = utility.visit([](const auto& u) -> Json {
    using T = std::decay_t<decltype(u)>;
    Json j;
    if constexpr (std::is_same_v<T, NegPosteriorVariance>) {
      j["type"] = "neg_posterior_variance";
      j["target"] = Json{{"weights", emit_vector(u.target.weights)}};
    } else if constexpr (std::is_same_v<T, DOptimality>) {
      j["type"] = "d_optimality";
    } else if constexpr (std::is_same_v<T, AOptimality>) {
      j["type"] = "a_optimality";
    } else if constexpr (std::is_same_v<T, DecisionQuadratic>) {
      j["type"] = "decision_quadratic";
      j["target"] = Json{{"weights", emit_vector(u.target.weights)}};
    } else {
      j["type"] = "decision_table";
      Json decisions = Json::array();
      for (std::size_t i = 0; i < u.labels.size(); ++i) {
        decisions.push_back(
            Json{{"label", u.labels[i]}, {"value", u.values[i].source()}});
      }
      j["decisions"] = std::move(decisions);
    }
    return j;
  });
  if (curve.has_value()) out["risk_curve"] = emit_curve(*curve);
  return out;
}

Json emit_cost(const CostModel& cost) {
  return std::visit(
      [](const auto& c) -> Json {
        using T = std::decay_t<decltype(c)>;
        Json out;
        if constexpr (std::is_same_v<T, PerMeasurementCost>) {
          out["type"] = "per_measurement";
          out["per_entry"] = c.per_entry;
        } else if constexpr (std::is_same_v<T, HierarchicalCost>) {
          out["type"] = "hierarchical";
          out["level_costs"] = c.level_costs;
        } else {
          out["type"] = "combined";
          out["per_entry"] = c.per_measurement.per_entry;
          out["level_costs"] = c.hierarchical.level_costs;
        }
        return out;
      },
      cost);
}

Json emit_design(const Design& design) {
  return design.visit([](const auto& d) -> Json {
    using T = std::decay_t<decltype(d)>;
    Json out;
    if constexpr (std::is_same_v<T, DeterministicDesign>) {
      out["type"] = "deterministic";
      out["plan"] = emit_triples(d.plan.entries());
    } else if constexpr (std::is_same_v<T, SimpleRandomSampleDesign>) {
      out["type"] = "simple_random_sample";
      out["sample_size"] = d.sample_size;
      out["variables"] = d.variables;
      out["time_index"] = d.time_index;
    } else {
      out["type"] = "weighted";
      Json plans = Json::array();
      for (const auto& [plan, prob] : d.support) {
        plans.push_back(Json{{"plan", emit_triples(plan.entries())}, {"probability", prob}});
      }
      out["plans"] = std::move(plans);
    }
    return out;
  });
}

Json emit_targets(const std::vector<Eigen::VectorXd>& targets) {
  Json out = Json::array();
  for (const auto& t : targets) out.push_back(emit_vector(t));
  return out;
}

Json emit_search(const SearchConfig& s) {
  Json out;
  out["strategy"] = s.strategy;
  if (s.budget_n.has_value()) out["budget_n"] = *s.budget_n;
  if (s.budget_cost.has_value()) out["budget_cost"] = *s.budget_cost;
  out["variables"] = s.variables;
  out["time_index"] = s.time_index;
  if (!s.targets.empty()) out["targets"] = emit_targets(s.targets);
  return out;
}

Json emit_scenario(const ScenarioConfig& s) {
  Json out;
  out["name"] = s.name;
  if (s.name == "sample-size") {
    out["target_variance"] = s.target_variance;
    out["n_max"] = s.n_max;
    if (!s.curve_points.empty()) out["curve_points"] = s.curve_points;
  } else if (s.name == "hierarchical") {
    out["omega_sq"] = s.omega_sq;
    out["shape"] = s.shape;
    out["budget"] = s.budget;
  } else if (s.name == "subsample") {
    out["n1"] = s.n1;
    out["strategies"] = s.strategies;
    out["time_index"] = s.time_index;
    if (!s.targets.empty()) out["targets"] = emit_targets(s.targets);
  } else if (s.name == "markov-timing") {
    out["total_observations"] = s.total_observations;
    out["per_unit_counts"] = s.per_unit_counts;
    out["spacings"] = s.spacings;
  } else if (s.name == "remeasurement") {
    out["rounds"] = s.rounds;
    out["n1"] = s.n1;
    out["strategy"] = s.strategy;
  }
  return out;
}

}  // namespace

Json emit_config(const RunConfig& config) {
  Json out;
  out["seed"] = config.seed;
  out["output_prefix"] = config.output_prefix;
  if (config.frame.has_value()) out["frame"] = emit_frame(config);
  require(config.model.has_value(), ErrorCode::InvalidArgument, "config has no model");
  out["model"] = emit_model(*config.model);
  if (config.utility.has_value()) out["utility"] = emit_utility(*config.utility, config.risk_curve);
  if (config.cost.has_value()) out["cost"] = emit_cost(*config.cost);
  if (config.design.has_value()) out["design"] = emit_design(*config.design);
  if (config.search.has_value()) out["search"] = emit_search(*config.search);
  if (config.scenario.has_value()) out["scenario"] = emit_scenario(*config.scenario);
  Json mc;
  mc["outer_draws"] = config.mc.outer_draws;
  mc["posterior_method"] =
      config.mc.posterior_method == PosteriorMethod::ExactIfAvailable ? "exact" : "importance";
  mc["n_particles"] = config.mc.n_particles;
  mc["plan_samples"] = config.mc.plan_samples;
  out["mc"] = std::move(mc);
  return out;
}

}  // namespace odos
