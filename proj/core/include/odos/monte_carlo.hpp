#pragma once

#include "odos/cost_model.hpp"
#include "odos/design.hpp"
#include "odos/utility.hpp"

namespace odos {

enum class PosteriorMethod { ExactIfAvailable, Importance };

struct MCConfig {
  std::size_t outer_draws = 1000;
  std::uint64_t seed = 0;
  PosteriorMethod posterior_method = PosteriorMethod::ExactIfAvailable;
  std::size_t n_particles = 20000;
  std::size_t plan_samples = 1000;
};

void validate_mc_config(const MCConfig& cfg);

struct UtilityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

bool has_exact_posterior(const ModelSpec& model);

// Posterior given everything observed so far. The plan the data came from may
// be passed along as metadata; by-design missingness is MAR, so it is ignored.
Posterior compute_posterior(const ModelSpec& model, const Dataset& data, const MCConfig& cfg,
                            std::uint64_t substream = 0,
                            const MeasurementPlan* plan_metadata = nullptr);

// Monte Carlo maximum expected utility of a deterministic plan: draw theta
// from the current posterior, simulate the plan's data, update, apply the
// inner decision maximization, average over outer draws.
UtilityEstimate expected_utility_plan(const MeasurementPlan& plan, const ModelSpec& model,
                                      const UtilitySpec& utility, const Dataset& prior_data,
                                      const MCConfig& cfg);

// Random designs: exact support-weighted average when enumerable, otherwise
// an average over sampled plans with a total-variance standard error.
// support_limit caps enumeration; smaller values force the sampling path.
UtilityEstimate expected_utility_design(const Design& design, const ModelSpec& model,
                                        const UtilitySpec& utility, const Dataset& prior_data,
                                        const MCConfig& cfg,
                                        std::size_t support_limit = kDefaultSupportLimit);

// Built-in cost models depend only on the plan, so the data integral drops.
UtilityEstimate expected_cost(const Design& design, const CostModel& cost,
                              const Dataset& prior_data, const MCConfig& cfg);

// Plug-in variant: simulate from a point estimate, re-estimate by ridge
// maximum likelihood, evaluate the utility at the new point estimate.
UtilityEstimate frequentist_expected_utility(const MeasurementPlan& plan, const ModelSpec& model,
                                             const UtilitySpec& utility, const Dataset& prior_data,
                                             const ParameterDraw& theta_hat0, const MCConfig& cfg);

// Ridge-penalized maximum likelihood (flat-prior surrogate posterior mode).
ParameterDraw ml_ridge_estimate(const ModelSpec& model, const Dataset& data,
                                double ridge = 1e-8);

// Per-outer-draw updated posteriors for a plan, on the cfg seed schedule.
// Shared with the value-of-information pricer so both sides of a comparison
// see common random numbers.
std::vector<Posterior> posterior_scaffold(const MeasurementPlan& plan, const ModelSpec& model,
                                          const Dataset& prior_data, const MCConfig& cfg);

}  // namespace odos
