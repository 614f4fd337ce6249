#include "odos/information.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace odos {

namespace {

Eigen::MatrixXd linreg_plan_information(const LinRegSpec& spec,
                                        const std::vector<Triple>& entries) {
  const Eigen::Index q = spec.prior_mean.size();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(q, q);
  for (const Triple& t : entries) {
    require(t.variable == spec.outcome_variable, ErrorCode::InvalidArgument,
            "LinReg information is defined for outcome cells only");
    require(static_cast<Eigen::Index>(t.unit) < spec.covariates.rows(),
            ErrorCode::InvalidArgument, "unit has no covariate row");
    const Eigen::VectorXd w = spec.covariates.row(t.unit).transpose();
    info += w * w.transpose() / spec.noise_variance;
  }
  return info;
}

Eigen::MatrixXd ctmc_plan_information(const TwoStateCtmcSpec& spec, const MeasurementPlan& plan,
                                      double lambda, double mu) {
  const StudyFrame& frame = *plan.frame();
  const double t_start = frame.time_grid().front();
  std::map<std::uint32_t, std::vector<double>> times_by_unit;
  for (const Triple& t : plan.entries()) {
    require(t.variable == spec.state_variable, ErrorCode::InvalidArgument,
            "CTMC plans may only select the state variable");
    times_by_unit[t.unit].push_back(frame.time_at(t.time_index));
  }
  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  for (auto& [unit, times] : times_by_unit) {
    (void)unit;
    std::sort(times.begin(), times.end());
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      const double dt = times[i + 1] - times[i];
      const Eigen::Vector2d row_law =
          ctmc_state_distribution(spec, lambda, mu, times[i] - t_start);
      const TransitionMatrix tm = ctmc_transition_matrix(lambda, mu, dt);
      const auto grads = ctmc_transition_gradients(lambda, mu, dt);
      for (int g = 0; g < 2; ++g) {
        for (int h = 0; h < 2; ++h) {
          const double p = tm.p(g, h);
          if (p <= 0.0) continue;
          Eigen::Vector2d dp(grads[0](g, h), grads[1](g, h));
          info += row_law[g] * (dp * dp.transpose()) / p;
        }
      }
    }
  }
  return info;
}

// Negative Hessian by central differences with per-component relative steps,
// shrunk near the non-negativity boundary of the CTMC intensities.
Eigen::MatrixXd fd_negative_hessian(const ModelSpec& model, const Dataset& data,
                                    const Eigen::VectorXd& theta) {
  const Eigen::Index d = theta.size();
  auto eval = [&](const Eigen::VectorXd& point) {
    return log_likelihood(model, ParameterDraw{model.kind(), point}, data);
  };
  Eigen::VectorXd steps(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double h = 1e-5 * (1.0 + std::abs(theta[k]));
    if (theta[k] - h < 0.0) h = std::max(theta[k] / 2.0, 1e-12);
    steps[k] = h;
  }
  Eigen::MatrixXd hessian(d, d);
  const double f0 = eval(theta);
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd up = theta, down = theta;
    up[k] += steps[k];
    down[k] -= steps[k];
    hessian(k, k) = (eval(up) - 2.0 * f0 + eval(down)) / (steps[k] * steps[k]);
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = k + 1; l < d; ++l) {
      Eigen::VectorXd pp = theta, pm = theta, mp = theta, mm = theta;
      pp[k] += steps[k]; pp[l] += steps[l];
      pm[k] += steps[k]; pm[l] -= steps[l];
      mp[k] -= steps[k]; mp[l] += steps[l];
      mm[k] -= steps[k]; mm[l] -= steps[l];
      const double mixed =
          (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * steps[k] * steps[l]);
      hessian(k, l) = mixed;
      hessian(l, k) = mixed;
    }
  }
  return -0.5 * (hessian + hessian.transpose());
}

}  // namespace

InformationMatrix expected_information(const ModelSpec& model, const MeasurementPlan& plan,
                                       const ParameterDraw& theta) {
  validate_draw(model, theta);
  Eigen::MatrixXd value = model.visit([&](const auto& spec) -> Eigen::MatrixXd {
    using T = std::decay_t<decltype(spec)>;
    if constexpr (std::is_same_v<T, NormalMeanSpec>) {
      Eigen::MatrixXd info(1, 1);
      info(0, 0) = static_cast<double>(plan.cardinality()) / spec.noise_variance;
      return info;
    } else if constexpr (std::is_same_v<T, LinRegSpec>) {
      return linreg_plan_information(spec, plan.entries());
    } else {
      return ctmc_plan_information(spec, plan, theta.theta[0], theta.theta[1]);
    }
  });
  return InformationMatrix{std::move(value), InformationMatrix::Tag::ExpectedNewData};
}

InformationMatrix observed_information(const ModelSpec& model, const Dataset& data,
                                       const ParameterDraw& theta) {
  validate_draw(model, theta);
  Eigen::MatrixXd value = model.visit([&](const auto& spec) -> Eigen::MatrixXd {
    using T = std::decay_t<decltype(spec)>;
    if constexpr (std::is_same_v<T, NormalMeanSpec>) {
      Eigen::MatrixXd info(1, 1);
      info(0, 0) = static_cast<double>(data.n_observed()) / spec.noise_variance;
      return info;
    } else if constexpr (std::is_same_v<T, LinRegSpec>) {
      std::vector<Triple> outcome_cells;
      for (const auto& [t, v] : data.values()) {
        (void)v;
        if (t.variable == spec.outcome_variable) outcome_cells.push_back(t);
      }
      return linreg_plan_information(spec, outcome_cells);
    } else {
      if (data.n_observed() == 0) return Eigen::MatrixXd::Zero(2, 2);
      return fd_negative_hessian(model, data, theta.theta);
    }
  });
  return InformationMatrix{std::move(value), InformationMatrix::Tag::Observed};
}

}  // namespace odos
