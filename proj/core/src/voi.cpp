#include "odos/voi.hpp"

#include <cmath>

namespace odos {

UtilityCurve UtilityCurve::identity() { return UtilityCurve(); }

UtilityCurve UtilityCurve::linear(double intercept, double slope) {
  require(slope > 0.0, ErrorCode::InvalidArgument, "utility curve slope must be > 0");
  UtilityCurve c;
  c.kind_ = Kind::Linear;
  c.intercept_ = intercept;
  c.slope_ = slope;
  return c;
}

UtilityCurve UtilityCurve::neg_exp(double risk_aversion) {
  require(risk_aversion > 0.0, ErrorCode::InvalidArgument, "risk aversion must be > 0");
  UtilityCurve c;
  c.kind_ = Kind::NegExp;
  c.risk_aversion_ = risk_aversion;
  return c;
}

UtilityCurve UtilityCurve::expression(const std::string& source) {
  UtilityCurve c;
  c.kind_ = Kind::Expr;
  c.expr_ = Expression::compile(source, {"v"});
  return c;
}

const std::string& UtilityCurve::expr_source() const {
  require(expr_.has_value(), ErrorCode::InvalidArgument, "curve has no expression");
  return expr_->source();
}

double UtilityCurve::operator()(double v) const {
  switch (kind_) {
    case Kind::Identity: return v;
    case Kind::Linear: return intercept_ + slope_ * v;
    case Kind::NegExp: return -std::exp(-risk_aversion_ * v);
    case Kind::Expr: {
      const double value = v;
      return expr_->eval(std::span<const double>(&value, 1));
    }
  }
  return v;
}

namespace {

// E[ U(v(d, theta) - price) ] under a posterior, for a fixed decision.
// Quadratic decisions integrate over the 1-D normal marginal of the target
// when the posterior is exact-normal; tables go through the generic
// expectation.
double expected_curved_value_table(const Posterior& posterior, const DecisionTable& table,
                                   std::size_t decision, const UtilityCurve& curve,
                                   double price) {
  return posterior.expectation([&](const Eigen::VectorXd& theta) {
    return curve(table.value(decision, theta) - price);
  });
}

double expected_curved_value_quadratic(const Posterior& posterior, const TargetFunctional& target,
                                       double d, const UtilityCurve& curve, double price) {
  if (posterior.is_exact()) {
    const double m = target.weights.dot(posterior.exact().mean);
    const double s2 = target.weights.dot(posterior.exact().cov * target.weights);
    const double s = std::sqrt(std::max(s2, 0.0));
    std::vector<double> nodes, weights;
    gauss_hermite(64, nodes, weights);
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double g = m + std::sqrt(2.0) * s * nodes[i];
      total += weights[i] * curve(-(d - g) * (d - g) - price);
    }
    return total / std::sqrt(3.14159265358979323846);
  }
  const Particles& p = posterior.particles();
  double total = 0.0;
  for (std::size_t i = 0; i < p.draws.size(); ++i) {
    const double g = target(p.draws[i]);
    total += p.weights[i] * curve(-(d - g) * (d - g) - price);
  }
  return total;
}

// Golden-section maximization; the integrand is unimodal in d for increasing
// concave curves composed with the concave quadratic value.
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-10 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max(f((a + b) / 2.0), std::max(fc, fd));
}

// Inner maximization over decisions of the curved value at a given price.
double inner_max_curved(const Posterior& posterior, const UtilitySpec& utility,
                        const UtilityCurve& curve, double price) {
  return utility.visit([&](const auto& u) -> double {
    using T = std::decay_t<decltype(u)>;
    if constexpr (std::is_same_v<T, DecisionTable>) {
      double best = kNegativeInfinity;
      for (std::size_t i = 0; i < u.labels.size(); ++i) {
        best = std::max(best, expected_curved_value_table(posterior, u, i, curve, price));
      }
      return best;
    } else if constexpr (std::is_same_v<T, DecisionQuadratic>) {
      double m, s2;
      if (posterior.is_exact()) {
        m = u.target.weights.dot(posterior.exact().mean);
        s2 = u.target.weights.dot(posterior.exact().cov * u.target.weights);
      } else {
        const Particles& p = posterior.particles();
        m = 0.0;
        for (std::size_t i = 0; i < p.draws.size(); ++i) m += p.weights[i] * u.target(p.draws[i]);
        s2 = 0.0;
        for (std::size_t i = 0; i < p.draws.size(); ++i) {
          const double diff = u.target(p.draws[i]) - m;
          s2 += p.weights[i] * diff * diff;
        }
      }
      const double radius = 8.0 * std::sqrt(std::max(s2, 0.0)) + 1e-9;
      return golden_max(
          [&](double d) {
            return expected_curved_value_quadratic(posterior, u.target, d, curve, price);
          },
          m - radius, m + radius);
    } else {
      fail(ErrorCode::InvalidArgument, "value-of-information needs a decision-based utility");
    }
  });
}

}  // namespace

VoiResult voi_linear(const MeasurementPlan& plan, const ModelSpec& model,
                     const UtilitySpec& decision_utility, const Dataset& prior_data,
                     const MCConfig& cfg) {
  require(decision_utility.is_decision_based(), ErrorCode::InvalidArgument,
          "value-of-information needs a decision-based utility");
  validate_mc_config(cfg);
  const Posterior current = compute_posterior(model, prior_data, cfg, 0);
  const double baseline = optimal_decision(current, decision_utility).expected_value;
  VoiResult out;
  out.method = VoiResult::Method::Linear;
  out.baseline = baseline;
  if (plan.cardinality() == 0) {
    // The null plan updates nothing; both sides coincide by construction.
    out.value = 0.0;
    out.std_error = 0.0;
    return out;
  }
  const UtilityEstimate with_data =
      expected_utility_plan(plan, model, decision_utility, prior_data, cfg);
  out.value = with_data.mean - baseline;
  out.std_error = with_data.std_error;
  return out;
}

VoiResult voi_price(const MeasurementPlan& plan, const ModelSpec& model,
                    const UtilitySpec& decision_utility, const UtilityCurve& curve,
                    const Dataset& prior_data, const MCConfig& cfg) {
  require(decision_utility.is_decision_based(), ErrorCode::InvalidArgument,
          "value-of-information needs a decision-based utility");
  validate_mc_config(cfg);
  const Posterior current = compute_posterior(model, prior_data, cfg, 0);
  const double rhs = inner_max_curved(current, decision_utility, curve, 0.0);

  VoiResult out;
  out.method = VoiResult::Method::Bisection;
  out.baseline = rhs;
  if (plan.cardinality() == 0) {
    out.value = 0.0;
    return out;
  }

  // One scaffold of updated posteriors for every price probe: the bisection
  // sees a deterministic, monotone-decreasing LHS(V).
  const std::vector<Posterior> updated = posterior_scaffold(plan, model, prior_data, cfg);
  std::vector<double> draw_values(updated.size());
  auto lhs = [&](double price) {
    double total = 0.0;
    for (std::size_t k = 0; k < updated.size(); ++k) {
      draw_values[k] = inner_max_curved(updated[k], decision_utility, curve, price);
      total += draw_values[k];
    }
    return total / static_cast<double>(updated.size());
  };

  if (lhs(0.0) < rhs) {
    out.value = 0.0;
    out.clamped_negative = true;
    return out;
  }
  double lo = 0.0;
  double hi = std::max(1.0, std::abs(rhs));
  int doublings = 0;
  while (lhs(hi) >= rhs) {
    hi *= 2.0;
    require(++doublings <= 200, ErrorCode::InvalidArgument,
            "cannot bracket the value-of-information price");
  }
  while (hi - lo > 1e-6 * (1.0 + std::abs((lo + hi) / 2.0))) {
    const double mid = (lo + hi) / 2.0;
    if (lhs(mid) >= rhs) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double price = (lo + hi) / 2.0;
  const double mean = lhs(price);
  double ss = 0.0;
  for (double v : draw_values) ss += (v - mean) * (v - mean);
  const std::size_t n = draw_values.size();
  out.value = price;
  out.std_error =
      n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return out;
}

Eligibility eligibility(const MeasurementPlan& plan, const CostModel& cost,
                        const VoiResult& voi) {
  const double c = plan_cost(plan, cost);
  return Eligibility{voi.value > c, voi.value - c};
}

}  // namespace odos
