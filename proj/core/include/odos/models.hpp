#pragma once

#include <Eigen/Dense>
#include <array>
#include <variant>

#include "odos/dataset.hpp"
#include "odos/plan.hpp"
#include "odos/rng.hpp"

namespace odos {

enum class ModelKind { NormalMean, LinReg, TwoStateCtmc };

const char* model_kind_name(ModelKind kind);

// Parameter vector tagged with the model family it belongs to.
// NormalMean: [theta]; LinReg: coefficient vector; TwoStateCtmc: [lambda, mu].
struct ParameterDraw {
  ModelKind kind = ModelKind::NormalMean;
  Eigen::VectorXd theta;
};

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

// x ~ N(theta, sigma^2) iid over observed cells, theta ~ N(mu0, tau0^2).
// tau0^2 = 0 is the degenerate point-mass prior.
struct NormalMeanSpec {
  double noise_variance = 1.0;
  double prior_mean = 0.0;
  double prior_variance = 1.0;
};

// y = w_i' beta + noise for the designated outcome variable; covariate rows W
// are fixed and known from first-stage data. Other variables in a dataset are
// treated as fixed covariate records, not modeled outcomes.
struct LinRegSpec {
  double noise_variance = 1.0;
  Eigen::VectorXd prior_mean;
  Eigen::MatrixXd prior_cov;
  Eigen::MatrixXd covariates;  // one row per unit
  std::uint32_t outcome_variable = 0;
};

// Two-state continuous-time Markov chain with exit intensities lambda (state
// 1 -> 2) and mu (state 2 -> 1), observed as a panel at grid times. States are
// recorded in datasets as the values 1 and 2. The chain starts at the frame's
// first grid time with distribution initial_dist.
struct TwoStateCtmcSpec {
  GammaPrior lambda_prior;
  GammaPrior mu_prior;
  Eigen::Vector2d initial_dist{1.0, 0.0};
  std::uint32_t state_variable = 0;
};

class ModelSpec {
 public:
  ModelSpec(NormalMeanSpec spec);       // NOLINT(google-explicit-constructor)
  ModelSpec(LinRegSpec spec);           // NOLINT(google-explicit-constructor)
  ModelSpec(TwoStateCtmcSpec spec);     // NOLINT(google-explicit-constructor)

  ModelKind kind() const;
  std::size_t parameter_dim() const;

  const NormalMeanSpec& normal_mean() const;
  const LinRegSpec& linreg() const;
  const TwoStateCtmcSpec& ctmc() const;

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), value_);
  }

 private:
  std::variant<NormalMeanSpec, LinRegSpec, TwoStateCtmcSpec> value_;
};

ParameterDraw sample_prior(const ModelSpec& model, Rng& rng);

// Simulates new data exactly at the plan's cells. The prior-data overload
// exists for the CTMC, where a unit's continuation starts from its last
// observed state; the Gaussian models treat new data as independent of old
// given theta.
Dataset simulate_data(const ModelSpec& model, const ParameterDraw& theta,
                      const MeasurementPlan& plan, Rng& rng);
Dataset simulate_data(const ModelSpec& model, const ParameterDraw& theta,
                      const MeasurementPlan& plan, const Dataset& prior_data, Rng& rng);

// log p(observed values | theta); Missing cells contribute nothing. The CTMC
// uses the discrete-observation likelihood: the marginal law at a unit's
// first observation time, then transition probabilities between consecutive
// observations.
double log_likelihood(const ModelSpec& model, const ParameterDraw& theta, const Dataset& data);

struct TransitionMatrix {
  Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
  bool degenerate = false;  // lambda = mu = 0 with dt > 0
};

TransitionMatrix ctmc_transition_matrix(double lambda, double mu, double dt);

// d P(dt) / d lambda and d P(dt) / d mu.
std::array<Eigen::Matrix2d, 2> ctmc_transition_gradients(double lambda, double mu, double dt);

// Marginal state distribution after `elapsed` time from the chain start.
Eigen::Vector2d ctmc_state_distribution(const TwoStateCtmcSpec& spec, double lambda, double mu,
                                        double elapsed);

void validate_draw(const ModelSpec& model, const ParameterDraw& theta);

}  // namespace odos
