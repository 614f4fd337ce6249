#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "odos/expression.hpp"
#include "odos/information.hpp"
#include "odos/posterior.hpp"

namespace odos {

// Scalar linear functional g(theta) = weights' theta.
struct TargetFunctional {
  Eigen::VectorXd weights;

  static TargetFunctional component(std::size_t index, std::size_t dim);
  static TargetFunctional linear(Eigen::VectorXd weights);

  double operator()(const Eigen::VectorXd& theta) const;
};

struct FiniteDecisions {
  std::vector<std::string> labels;
};
struct RealLineDecisions {};
using DecisionSpace = std::variant<FiniteDecisions, RealLineDecisions>;

struct NegPosteriorVariance {
  TargetFunctional target;
};
struct DOptimality {};
struct AOptimality {};

// Point estimation under squared loss: v(d, theta) = -(d - g(theta))^2.
struct DecisionQuadratic {
  TargetFunctional target;
};

// Finite decision set with per-decision value expressions over theta
// components (variables theta0, theta1, ...).
struct DecisionTable {
  std::vector<std::string> labels;
  std::vector<Expression> values;

  static DecisionTable from_expressions(std::vector<std::string> labels,
                                        std::vector<std::string> expressions,
                                        std::size_t parameter_dim);
  double value(std::size_t decision, const Eigen::VectorXd& theta) const;
};

class UtilitySpec {
 public:
  UtilitySpec(NegPosteriorVariance u);  // NOLINT(google-explicit-constructor)
  UtilitySpec(DOptimality u);           // NOLINT(google-explicit-constructor)
  UtilitySpec(AOptimality u);           // NOLINT(google-explicit-constructor)
  UtilitySpec(DecisionQuadratic u);     // NOLINT(google-explicit-constructor)
  UtilitySpec(DecisionTable u);         // NOLINT(google-explicit-constructor)

  bool is_decision_based() const;
  bool is_information_based() const;
  DecisionSpace decision_space() const;

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), value_);
  }

 private:
  std::variant<NegPosteriorVariance, DOptimality, AOptimality, DecisionQuadratic, DecisionTable>
      value_;
};

inline constexpr double kNegativeInfinity = -std::numeric_limits<double>::infinity();

// log det(I_new + I_obs); -inf sentinel when the sum is singular, so searches
// rank infeasible plans below every feasible one.
double d_optimality_utility(const InformationMatrix& expected_info,
                            const InformationMatrix& observed_info);

// -trace((I_new + I_obs)^-1); throws SingularMatrix when not invertible.
double a_optimality_utility(const InformationMatrix& expected_info,
                            const InformationMatrix& observed_info);

double neg_posterior_variance(const Posterior& posterior, const TargetFunctional& target);

struct Decision {
  std::string label;            // empty for real-line decisions
  double point = 0.0;           // the chosen d for real-line decisions
  double expected_value = 0.0;  // inner-max expected utility
};

// Inner maximization over decisions under the given posterior.
Decision optimal_decision(const Posterior& posterior, const UtilitySpec& utility);

}  // namespace odos
