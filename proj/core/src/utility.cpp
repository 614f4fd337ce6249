#include "odos/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace odos {

TargetFunctional TargetFunctional::component(std::size_t index, std::size_t dim) {
  require(index < dim, ErrorCode::InvalidArgument, "target component out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  w[static_cast<Eigen::Index>(index)] = 1.0;
  return TargetFunctional{std::move(w)};
}

TargetFunctional TargetFunctional::linear(Eigen::VectorXd weights) {
  require(weights.size() >= 1, ErrorCode::InvalidArgument, "target needs weights");
  return TargetFunctional{std::move(weights)};
}

double TargetFunctional::operator()(const Eigen::VectorXd& theta) const {
  require(theta.size() == weights.size(), ErrorCode::DimensionMismatch,
          "target functional dimension mismatch");
  return weights.dot(theta);
}

DecisionTable DecisionTable::from_expressions(std::vector<std::string> labels,
                                              std::vector<std::string> expressions,
                                              std::size_t parameter_dim) {
  require(!labels.empty(), ErrorCode::InvalidArgument, "decision table must be non-empty");
  require(labels.size() == expressions.size(), ErrorCode::InvalidArgument,
          "decision table labels/values mismatch");
  std::vector<std::string> variables;
  variables.reserve(parameter_dim);
  for (std::size_t i = 0; i < parameter_dim; ++i) variables.push_back("theta" + std::to_string(i));
  DecisionTable table;
  table.labels = std::move(labels);
  table.values.reserve(expressions.size());
  for (const auto& e : expressions) table.values.push_back(Expression::compile(e, variables));
  return table;
}

double DecisionTable::value(std::size_t decision, const Eigen::VectorXd& theta) const {
  require(decision < values.size(), ErrorCode::InvalidArgument, "decision index out of range");
  return values[decision].eval(std::span<const double>(theta.data(),
                                                       static_cast<std::size_t>(theta.size())));
}

UtilitySpec::UtilitySpec(NegPosteriorVariance u) : value_(std::move(u)) {}
UtilitySpec::UtilitySpec(DOptimality u) : value_(u) {}
UtilitySpec::UtilitySpec(AOptimality u) : value_(u) {}
UtilitySpec::UtilitySpec(DecisionQuadratic u) : value_(std::move(u)) {}
UtilitySpec::UtilitySpec(DecisionTable u) : value_(std::move(u)) {
  require(!std::get<DecisionTable>(value_).labels.empty(), ErrorCode::InvalidArgument,
          "decision table must be non-empty");
}

bool UtilitySpec::is_decision_based() const {
  return std::holds_alternative<DecisionQuadratic>(value_) ||
         std::holds_alternative<DecisionTable>(value_);
}

bool UtilitySpec::is_information_based() const {
  return std::holds_alternative<DOptimality>(value_) ||
         std::holds_alternative<AOptimality>(value_);
}

DecisionSpace UtilitySpec::decision_space() const {
  require(is_decision_based(), ErrorCode::InvalidArgument,
          "utility has no decision space");
  if (const auto* table = std::get_if<DecisionTable>(&value_)) {
    return FiniteDecisions{table->labels};
  }
  return RealLineDecisions{};
}

namespace {

Eigen::MatrixXd information_sum(const InformationMatrix& a, const InformationMatrix& b) {
  require(a.value.rows() == b.value.rows() && a.value.cols() == b.value.cols(),
          ErrorCode::DimensionMismatch, "information matrices must have equal dimension");
  return a.value + b.value;
}

}  // namespace

double d_optimality_utility(const InformationMatrix& expected_info,
                            const InformationMatrix& observed_info) {
  const Eigen::MatrixXd sum = information_sum(expected_info, observed_info);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev <= 0.0 || !std::isfinite(ev)) return kNegativeInfinity;
    log_det += std::log(ev);
  }
  return log_det;
}

double a_optimality_utility(const InformationMatrix& expected_info,
                            const InformationMatrix& observed_info) {
  const Eigen::MatrixXd sum = information_sum(expected_info, observed_info);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
  double trace_inv = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    require(ev > 0.0 && std::isfinite(ev), ErrorCode::SingularMatrix,
            "information sum is singular");
    trace_inv += 1.0 / ev;
  }
  return -trace_inv;
}

double neg_posterior_variance(const Posterior& posterior, const TargetFunctional& target) {
  if (posterior.is_exact()) {
    const ExactNormal& e = posterior.exact();
    return -target.weights.dot(e.cov * target.weights);
  }
  const Particles& p = posterior.particles();
  double mean = 0.0;
  for (std::size_t i = 0; i < p.draws.size(); ++i) mean += p.weights[i] * target(p.draws[i]);
  double variance = 0.0;
  for (std::size_t i = 0; i < p.draws.size(); ++i) {
    const double d = target(p.draws[i]) - mean;
    variance += p.weights[i] * d * d;
  }
  return -variance;
}

Decision optimal_decision(const Posterior& posterior, const UtilitySpec& utility) {
  require(utility.is_decision_based(), ErrorCode::InvalidArgument,
          "optimal_decision needs a decision-based utility");
  return utility.visit([&](const auto& u) -> Decision {
    using T = std::decay_t<decltype(u)>;
    if constexpr (std::is_same_v<T, DecisionQuadratic>) {
      // Quadratic loss: the posterior mean is optimal and attains -variance.
      double mean;
      if (posterior.is_exact()) {
        mean = u.target.weights.dot(posterior.exact().mean);
      } else {
        const Particles& p = posterior.particles();
        mean = 0.0;
        for (std::size_t i = 0; i < p.draws.size(); ++i) {
          mean += p.weights[i] * u.target(p.draws[i]);
        }
      }
      return Decision{"", mean, neg_posterior_variance(posterior, u.target)};
    } else if constexpr (std::is_same_v<T, DecisionTable>) {
      // Iterate decisions in label order so exact ties resolve to the
      // lexicographically first label.
      std::vector<std::size_t> order(u.labels.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return u.labels[a] < u.labels[b]; });
      bool have_best = false;
      Decision best;
      for (std::size_t i : order) {
        const double expected = posterior.expectation(
            [&](const Eigen::VectorXd& theta) { return u.value(i, theta); });
        if (!have_best || expected > best.expected_value) {
          best = Decision{u.labels[i], static_cast<double>(i), expected};
          have_best = true;
        }
      }
      return best;
    } else {
      fail(ErrorCode::InvalidArgument, "utility is not decision-based");
    }
  });
}

}  // namespace odos
