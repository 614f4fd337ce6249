#pragma once

#include <functional>
#include <string>

#include "odos/models.hpp"

namespace odos::testkit {

// Deliberately naive re-derivations used as acceptance oracles. Nothing here
// reuses the algorithmic code paths being checked; only the domain types and
// model density formulas are shared.

struct OracleReport {
  std::string oracle;
  double reference = 0.0;
  double comparand = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static OracleReport compare(std::string name, double reference, double comparand,
                              double tolerance);
};

struct ConjugateMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Direct conjugate formulas for NormalMean and LinReg.
ConjugateMoments conjugate_oracle(const ModelSpec& model, const Dataset& data);

struct EnumerationResult {
  std::vector<std::size_t> best_subset;
  double best_value = 0.0;
  std::size_t n_feasible = 0;
};

// Bitmask enumeration of all feasible increment subsets; ties resolve to the
// lexicographically smallest index set.
EnumerationResult enumerate_oracle(
    const std::vector<MeasurementPlan>& increments,
    const std::function<bool(const MeasurementPlan&)>& feasible,
    const std::function<double(const MeasurementPlan&)>& objective,
    std::size_t subset_limit = 100000);

struct QuadratureMoments {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
  double log_evidence = 0.0;
};

// Trapezoid quadrature of prior x likelihood over an (intensity, intensity)
// grid truncated at mean + 10 sd of each Gamma prior.
QuadratureMoments quadrature_oracle(const TwoStateCtmcSpec& spec, const Dataset& data,
                                    std::size_t grid_points = 300);

// Marginal likelihood of the observed values under the Gaussian models,
// computed from the closed-form multivariate-normal marginal.
double gaussian_log_evidence(const ModelSpec& model, const Dataset& data);

// Expected log-likelihood curvature of the plan's transition observations by
// central finite differences; the analytic expected-information path is
// checked against this.
Eigen::Matrix2d ctmc_expected_info_fd(const TwoStateCtmcSpec& spec, const MeasurementPlan& plan,
                                      double lambda, double mu, double step = 1e-4);

// Posterior variance of the grand mean for a balanced nested allocation,
// via the per-level information recursion h -> c h / (1 + omega^2 c h).
// allocation is top-down: clusters at the highest level, children per node,
// ..., units per lowest cluster.
double balanced_hierarchy_posterior_variance(double prior_variance, double noise_variance,
                                             const std::vector<double>& omega_sq,
                                             const std::vector<std::size_t>& allocation);

}  // namespace odos::testkit
