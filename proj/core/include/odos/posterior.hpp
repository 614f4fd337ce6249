#pragma once

#include <Eigen/Dense>
#include <functional>
#include <variant>
#include <vector>

#include "odos/models.hpp"

namespace odos {

struct ExactNormal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Self-normalized weighted parameter draws.
struct Particles {
  ModelKind kind = ModelKind::NormalMean;
  std::vector<Eigen::VectorXd> draws;
  std::vector<double> weights;
  double ess = 0.0;
};

class Posterior {
 public:
  Posterior(ExactNormal exact, ModelKind kind);   // NOLINT(google-explicit-constructor)
  explicit Posterior(Particles particles);

  bool is_exact() const { return std::holds_alternative<ExactNormal>(value_); }
  const ExactNormal& exact() const;
  const Particles& particles() const;
  ModelKind kind() const { return kind_; }
  std::size_t dim() const;

  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;

  // Expectation of an arbitrary function of theta. Exact-normal posteriors use
  // Gauss-Hermite product quadrature (supported up to dimension 4), particle
  // posteriors the weighted sum; deterministic either way.
  double expectation(const std::function<double(const Eigen::VectorXd&)>& f) const;

  // One draw: multivariate normal sample or weight-proportional resample.
  ParameterDraw draw(Rng& rng) const;

 private:
  std::variant<ExactNormal, Particles> value_;
  ModelKind kind_;
};

// Conjugate update for the normal-mean model; the prior is returned unchanged
// when nothing is observed.
Posterior posterior_normal_mean(const NormalMeanSpec& model, const Dataset& data);

// Conjugate update for Bayesian linear regression over the observed outcome
// rows.
Posterior posterior_linreg(const LinRegSpec& model, const Dataset& data);

// Prior importance sampling: prior draws weighted by likelihood. Reports the
// effective sample size 1/sum(w^2); throws DegenerateWeights below ESS 10.
Posterior importance_posterior(const ModelSpec& model, const Dataset& data,
                               std::size_t n_particles, Rng& rng);

// Gauss-Hermite nodes and weights for integrating against exp(-x^2).
void gauss_hermite(std::size_t order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace odos
