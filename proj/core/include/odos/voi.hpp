#pragma once

#include <optional>

#include "odos/monte_carlo.hpp"

namespace odos {

// Strictly increasing transform applied to decision value, U(v). Identity and
// linear curves keep pricing closed under Eq.-style expected-value
// differences; the exponential curve expresses risk aversion.
class UtilityCurve {
 public:
  enum class Kind { Identity, Linear, NegExp, Expr };

  static UtilityCurve identity();
  static UtilityCurve linear(double intercept, double slope);
  static UtilityCurve neg_exp(double risk_aversion);
  static UtilityCurve expression(const std::string& source);  // variable: v

  double operator()(double v) const;
  bool is_identity() const { return kind_ == Kind::Identity; }
  Kind kind() const { return kind_; }
  double intercept() const { return intercept_; }
  double slope() const { return slope_; }
  double risk_aversion() const { return risk_aversion_; }
  const std::string& expr_source() const;

 private:
  UtilityCurve() = default;
  Kind kind_ = Kind::Identity;
  double intercept_ = 0.0;
  double slope_ = 1.0;
  double risk_aversion_ = 1.0;
  std::optional<Expression> expr_;
};

struct VoiResult {
  double value = 0.0;     // the price V, or the linear difference
  double baseline = 0.0;  // no-new-data inner max
  enum class Method { Linear, Bisection } method = Method::Linear;
  double std_error = 0.0;
  bool clamped_negative = false;  // bisection found LHS < RHS already at V = 0
};

// Linear-utility value of information: the expected-value difference between
// deciding after the plan's data and deciding now. Both terms share one seed
// schedule.
VoiResult voi_linear(const MeasurementPlan& plan, const ModelSpec& model,
                     const UtilitySpec& decision_utility, const Dataset& prior_data,
                     const MCConfig& cfg);

// General price: bisection on V until buying the data at price V is exactly
// indifferent to deciding now. Requires a strictly increasing curve.
VoiResult voi_price(const MeasurementPlan& plan, const ModelSpec& model,
                    const UtilitySpec& decision_utility, const UtilityCurve& curve,
                    const Dataset& prior_data, const MCConfig& cfg);

struct Eligibility {
  bool eligible = false;
  double margin = 0.0;
};

// A design is worth running only if its value of information strictly exceeds
// its cost; otherwise the null design wins.
Eligibility eligibility(const MeasurementPlan& plan, const CostModel& cost, const VoiResult& voi);

}  // namespace odos
