#include "odos/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "odos/parallel.hpp"

namespace odos {

namespace {

UtilityEstimate summarize(const std::vector<double>& values) {
  const std::size_t n = values.size();
  bool all_finite = true;
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) all_finite = false;
    sum += v;
  }
  if (!all_finite) {
    // Singular-information draws carry the -inf sentinel; the whole estimate
    // ranks below every finite one.
    return UtilityEstimate{kNegativeInfinity, 0.0, n};
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double std_error =
      n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return UtilityEstimate{mean, std_error, n};
}

ParameterDraw draw_current(const ModelSpec& model, const Dataset& prior_data,
                           const Posterior* current, Rng& rng) {
  if (prior_data.n_observed() == 0) return sample_prior(model, rng);
  return current->draw(rng);
}

double evaluate_posterior_utility(const UtilitySpec& utility, const Posterior& posterior) {
  return utility.visit([&](const auto& u) -> double {
    using T = std::decay_t<decltype(u)>;
    if constexpr (std::is_same_v<T, NegPosteriorVariance>) {
      return neg_posterior_variance(posterior, u.target);
    } else if constexpr (std::is_same_v<T, DecisionQuadratic> ||
                         std::is_same_v<T, DecisionTable>) {
      return optimal_decision(posterior, UtilitySpec(u)).expected_value;
    } else {
      fail(ErrorCode::InvalidArgument, "information-based utility has no posterior form");
    }
  });
}

Posterior point_mass_posterior(const ParameterDraw& theta) {
  Particles p;
  p.kind = theta.kind;
  p.draws = {theta.theta};
  p.weights = {1.0};
  return Posterior(std::move(p));
}

// Compact Nelder-Mead for the CTMC ridge fit; parameters live on the log
// scale so the intensity positivity constraint is built in.
Eigen::VectorXd nelder_mead_2d(const std::function<double(const Eigen::Vector2d&)>& f,
                               Eigen::Vector2d start, int max_iter = 400) {
  constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  std::array<Eigen::Vector2d, 3> simplex{start, start, start};
  simplex[1][0] += 0.25;
  simplex[2][1] += 0.25;
  std::array<double, 3> value{f(simplex[0]), f(simplex[1]), f(simplex[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return value[a] < value[b]; });
    const int best = order[0], mid = order[1], worst = order[2];
    if (std::abs(value[worst] - value[best]) < 1e-12 * (1.0 + std::abs(value[best]))) break;
    const Eigen::Vector2d centroid = (simplex[best] + simplex[mid]) / 2.0;
    const Eigen::Vector2d reflected = centroid + alpha * (centroid - simplex[worst]);
    const double fr = f(reflected);
    if (fr < value[best]) {
      const Eigen::Vector2d expanded = centroid + gamma * (reflected - centroid);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
    } else if (fr < value[mid]) {
      simplex[worst] = reflected;
      value[worst] = fr;
    } else {
      const Eigen::Vector2d contracted = centroid + rho * (simplex[worst] - centroid);
      const double fc = f(contracted);
      if (fc < value[worst]) {
        simplex[worst] = contracted;
        value[worst] = fc;
      } else {
        simplex[mid] = simplex[best] + sigma * (simplex[mid] - simplex[best]);
        simplex[worst] = simplex[best] + sigma * (simplex[worst] - simplex[best]);
        value[mid] = f(simplex[mid]);
        value[worst] = f(simplex[worst]);
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (value[i] < value[best]) best = i;
  return simplex[best];
}

}  // namespace

void validate_mc_config(const MCConfig& cfg) {
  require(cfg.outer_draws >= 1, ErrorCode::InvalidArgument, "outer_draws must be >= 1");
  require(cfg.plan_samples >= 1, ErrorCode::InvalidArgument, "plan_samples must be >= 1");
}

bool has_exact_posterior(const ModelSpec& model) {
  return model.kind() == ModelKind::NormalMean || model.kind() == ModelKind::LinReg;
}

Posterior compute_posterior(const ModelSpec& model, const Dataset& data, const MCConfig& cfg,
                            std::uint64_t substream, const MeasurementPlan* plan_metadata) {
  (void)plan_metadata;  // by-design missingness is MAR: the plan is ignorable
  if (cfg.posterior_method == PosteriorMethod::ExactIfAvailable && has_exact_posterior(model)) {
    if (model.kind() == ModelKind::NormalMean) return posterior_normal_mean(model.normal_mean(), data);
    return posterior_linreg(model.linreg(), data);
  }
  Rng rng = child_rng(cfg.seed, streams::kPosterior, substream);
  return importance_posterior(model, data, cfg.n_particles, rng);
}

UtilityEstimate expected_utility_plan(const MeasurementPlan& plan, const ModelSpec& model,
                                      const UtilitySpec& utility, const Dataset& prior_data,
                                      const MCConfig& cfg) {
  validate_mc_config(cfg);
  std::optional<Posterior> current;
  if (prior_data.n_observed() > 0) current = compute_posterior(model, prior_data, cfg, 0);

  std::vector<double> values(cfg.outer_draws);
  parallel_for(cfg.outer_draws, [&](std::size_t k) {
    Rng rng = child_rng(cfg.seed, streams::kOuterDraw, k);
    const ParameterDraw theta =
        draw_current(model, prior_data, current ? &*current : nullptr, rng);
    if (utility.is_information_based()) {
      const InformationMatrix expected = expected_information(model, plan, theta);
      const InformationMatrix observed = observed_information(model, prior_data, theta);
      values[k] = utility.visit([&](const auto& u) -> double {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, DOptimality>) {
          return d_optimality_utility(expected, observed);
        } else if constexpr (std::is_same_v<T, AOptimality>) {
          return a_optimality_utility(expected, observed);
        } else {
          fail(ErrorCode::InvalidArgument, "unreachable");
        }
      });
      return;
    }
    const Dataset new_data = simulate_data(model, theta, plan, prior_data, rng);
    const Dataset combined = prior_data.merged_with(new_data);
    if (cfg.posterior_method == PosteriorMethod::ExactIfAvailable && has_exact_posterior(model)) {
      const Posterior post = model.kind() == ModelKind::NormalMean
                                 ? posterior_normal_mean(model.normal_mean(), combined)
                                 : posterior_linreg(model.linreg(), combined);
      values[k] = evaluate_posterior_utility(utility, post);
    } else {
      const Posterior post = importance_posterior(model, combined, cfg.n_particles, rng);
      values[k] = evaluate_posterior_utility(utility, post);
    }
  });
  return summarize(values);
}

std::vector<Posterior> posterior_scaffold(const MeasurementPlan& plan, const ModelSpec& model,
                                          const Dataset& prior_data, const MCConfig& cfg) {
  validate_mc_config(cfg);
  std::optional<Posterior> current;
  if (prior_data.n_observed() > 0) current = compute_posterior(model, prior_data, cfg, 0);
  std::vector<std::optional<Posterior>> slots(cfg.outer_draws);
  parallel_for(cfg.outer_draws, [&](std::size_t k) {
    Rng rng = child_rng(cfg.seed, streams::kOuterDraw, k);
    const ParameterDraw theta =
        draw_current(model, prior_data, current ? &*current : nullptr, rng);
    const Dataset new_data = simulate_data(model, theta, plan, prior_data, rng);
    const Dataset combined = prior_data.merged_with(new_data);
    if (cfg.posterior_method == PosteriorMethod::ExactIfAvailable && has_exact_posterior(model)) {
      slots[k] = model.kind() == ModelKind::NormalMean
                     ? posterior_normal_mean(model.normal_mean(), combined)
                     : posterior_linreg(model.linreg(), combined);
    } else {
      slots[k] = importance_posterior(model, combined, cfg.n_particles, rng);
    }
  });
  std::vector<Posterior> out;
  out.reserve(cfg.outer_draws);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

UtilityEstimate expected_utility_design(const Design& design, const ModelSpec& model,
                                        const UtilitySpec& utility, const Dataset& prior_data,
                                        const MCConfig& cfg, std::size_t support_limit) {
  validate_mc_config(cfg);
  const std::size_t support_size = design_support_size(design, support_limit);
  if (support_size <= support_limit) {
    const auto support = design_support(design, support_limit);
    double mean = 0.0;
    double var = 0.0;
    std::size_t n_samples = 0;
    for (const auto& [plan, prob] : support) {
      const UtilityEstimate est = expected_utility_plan(plan, model, utility, prior_data, cfg);
      mean += prob * est.mean;
      var += prob * prob * est.std_error * est.std_error;
      n_samples += est.n_samples;
    }
    return UtilityEstimate{mean, std::sqrt(var), n_samples};
  }
  // Two-stage estimator over sampled plans; the between-plan spread plus the
  // plug-in inner variances give the total-variance standard error.
  const std::size_t k_plans = cfg.plan_samples;
  std::vector<double> means(k_plans);
  std::vector<double> inner_vars(k_plans);
  for (std::size_t i = 0; i < k_plans; ++i) {
    Rng rng = child_rng(cfg.seed, streams::kPlanSample, i);
    const MeasurementPlan plan = sample_plan(design, rng);
    const UtilityEstimate est = expected_utility_plan(plan, model, utility, prior_data, cfg);
    means[i] = est.mean;
    inner_vars[i] = est.std_error * est.std_error;
  }
  UtilityEstimate overall = summarize(means);
  if (std::isfinite(overall.mean)) {
    const double avg_inner =
        std::accumulate(inner_vars.begin(), inner_vars.end(), 0.0) / static_cast<double>(k_plans);
    const double sample_var = overall.std_error * overall.std_error * static_cast<double>(k_plans);
    const double between = std::max(0.0, sample_var - avg_inner);
    overall.std_error = std::sqrt((between + avg_inner) / static_cast<double>(k_plans));
  }
  overall.n_samples = k_plans;
  return overall;
}

UtilityEstimate expected_cost(const Design& design, const CostModel& cost,
                              const Dataset& prior_data, const MCConfig& cfg) {
  (void)prior_data;  // built-in costs depend only on the plan
  validate_mc_config(cfg);
  validate_cost_model(cost);
  const std::size_t support_size = design_support_size(design);
  if (support_size <= kDefaultSupportLimit) {
    const auto support = design_support(design);
    double mean = 0.0;
    for (const auto& [plan, prob] : support) mean += prob * plan_cost(plan, cost);
    return UtilityEstimate{mean, 0.0, support.size()};
  }
  std::vector<double> costs(cfg.plan_samples);
  for (std::size_t i = 0; i < cfg.plan_samples; ++i) {
    Rng rng = child_rng(cfg.seed, streams::kPlanSample, i);
    costs[i] = plan_cost(sample_plan(design, rng), cost);
  }
  return summarize(costs);
}

ParameterDraw ml_ridge_estimate(const ModelSpec& model, const Dataset& data, double ridge) {
  require(ridge >= 0.0, ErrorCode::InvalidArgument, "ridge must be >= 0");
  switch (model.kind()) {
    case ModelKind::NormalMean: {
      const auto& spec = model.normal_mean();
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& [t, v] : data.values()) {
        (void)t;
        sum += v;
        ++n;
      }
      Eigen::VectorXd theta(1);
      theta[0] = (sum / spec.noise_variance) /
                 (static_cast<double>(n) / spec.noise_variance + ridge);
      return ParameterDraw{ModelKind::NormalMean, std::move(theta)};
    }
    case ModelKind::LinReg: {
      const auto& spec = model.linreg();
      const Eigen::Index q = spec.prior_mean.size();
      Eigen::MatrixXd precision = ridge * Eigen::MatrixXd::Identity(q, q);
      Eigen::VectorXd shift = Eigen::VectorXd::Zero(q);
      for (const auto& [t, v] : data.values()) {
        if (t.variable != spec.outcome_variable) continue;
        const Eigen::VectorXd w = spec.covariates.row(t.unit).transpose();
        precision += w * w.transpose() / spec.noise_variance;
        shift += w * v / spec.noise_variance;
      }
      Eigen::VectorXd theta = precision.ldlt().solve(shift);
      return ParameterDraw{ModelKind::LinReg, std::move(theta)};
    }
    case ModelKind::TwoStateCtmc: {
      const auto& spec = model.ctmc();
      const double start_lambda =
          std::max(spec.lambda_prior.shape / spec.lambda_prior.rate, 1e-3);
      const double start_mu = std::max(spec.mu_prior.shape / spec.mu_prior.rate, 1e-3);
      auto objective = [&](const Eigen::Vector2d& log_rates) {
        Eigen::VectorXd theta(2);
        theta[0] = std::exp(log_rates[0]);
        theta[1] = std::exp(log_rates[1]);
        const double ll =
            log_likelihood(model, ParameterDraw{ModelKind::TwoStateCtmc, theta}, data);
        const double penalty = 0.5 * ridge * (theta[0] * theta[0] + theta[1] * theta[1]);
        return -(ll - penalty);
      };
      const Eigen::Vector2d best = nelder_mead_2d(
          objective, Eigen::Vector2d(std::log(start_lambda), std::log(start_mu)));
      Eigen::VectorXd theta(2);
      theta[0] = std::exp(best[0]);
      theta[1] = std::exp(best[1]);
      return ParameterDraw{ModelKind::TwoStateCtmc, std::move(theta)};
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown model kind");
}

UtilityEstimate frequentist_expected_utility(const MeasurementPlan& plan, const ModelSpec& model,
                                             const UtilitySpec& utility, const Dataset& prior_data,
                                             const ParameterDraw& theta_hat0, const MCConfig& cfg) {
  validate_mc_config(cfg);
  validate_draw(model, theta_hat0);
  std::vector<double> values(cfg.outer_draws);
  parallel_for(cfg.outer_draws, [&](std::size_t k) {
    Rng rng = child_rng(cfg.seed, streams::kOuterDraw, k);
    const Dataset new_data = simulate_data(model, theta_hat0, plan, prior_data, rng);
    const Dataset combined = prior_data.merged_with(new_data);
    const ParameterDraw theta_hat = ml_ridge_estimate(model, combined);
    if (utility.is_information_based()) {
      const InformationMatrix expected = expected_information(model, plan, theta_hat);
      const InformationMatrix observed = observed_information(model, prior_data, theta_hat);
      values[k] = utility.visit([&](const auto& u) -> double {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, DOptimality>) {
          return d_optimality_utility(expected, observed);
        } else if constexpr (std::is_same_v<T, AOptimality>) {
          return a_optimality_utility(expected, observed);
        } else {
          fail(ErrorCode::InvalidArgument, "unreachable");
        }
      });
    } else {
      values[k] = evaluate_posterior_utility(utility, point_mass_posterior(theta_hat));
    }
  });
  return summarize(values);
}

}  // namespace odos
