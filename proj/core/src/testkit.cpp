#include "odos/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace odos::testkit {

OracleReport OracleReport::compare(std::string name, double reference, double comparand,
                                   double tolerance) {
  require(tolerance > 0.0, ErrorCode::InvalidArgument, "oracle tolerance must be > 0");
  OracleReport r;
  r.oracle = std::move(name);
  r.reference = reference;
  r.comparand = comparand;
  r.tolerance = tolerance;
  r.pass = std::abs(reference - comparand) <= tolerance;
  return r;
}

ConjugateMoments conjugate_oracle(const ModelSpec& model, const Dataset& data) {
  if (model.kind() == ModelKind::NormalMean) {
    const auto& spec = model.normal_mean();
    double sum = 0.0;
    double count = 0.0;
    for (const auto& [t, v] : data.values()) {
      (void)t;
      sum += v;
      count += 1.0;
    }
    ConjugateMoments m;
    m.mean.resize(1);
    m.cov.resize(1, 1);
    if (spec.prior_variance == 0.0) {
      m.mean[0] = spec.prior_mean;
      m.cov(0, 0) = 0.0;
    } else {
      const double post_var =
          1.0 / (1.0 / spec.prior_variance + count / spec.noise_variance);
      m.cov(0, 0) = post_var;
      m.mean[0] =
          post_var * (spec.prior_mean / spec.prior_variance + sum / spec.noise_variance);
    }
    return m;
  }
  require(model.kind() == ModelKind::LinReg, ErrorCode::InvalidArgument,
          "conjugate oracle covers NormalMean and LinReg");
  const auto& spec = model.linreg();
  const Eigen::Index q = spec.prior_mean.size();
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(q);
  for (const auto& [t, v] : data.values()) {
    if (t.variable != spec.outcome_variable) continue;
    const Eigen::VectorXd w = spec.covariates.row(t.unit).transpose();
    xtx += w * w.transpose();
    xty += w * v;
  }
  const Eigen::MatrixXd prior_precision = spec.prior_cov.inverse();
  ConjugateMoments m;
  m.cov = (prior_precision + xtx / spec.noise_variance).inverse();
  m.mean = m.cov * (prior_precision * spec.prior_mean + xty / spec.noise_variance);
  return m;
}

EnumerationResult enumerate_oracle(
    const std::vector<MeasurementPlan>& increments,
    const std::function<bool(const MeasurementPlan&)>& feasible,
    const std::function<double(const MeasurementPlan&)>& objective,
    std::size_t subset_limit) {
  require(!increments.empty(), ErrorCode::InvalidArgument, "oracle needs increments");
  require(increments.size() <= 63, ErrorCode::SpaceTooLarge,
          "bitmask oracle supports at most 63 increments");
  const std::uint64_t n_subsets = 1ull << increments.size();
  EnumerationResult result;
  bool have_best = false;
  for (std::uint64_t mask = 0; mask < n_subsets; ++mask) {
    std::vector<std::size_t> subset;
    MeasurementPlan plan = MeasurementPlan::empty(increments.front().frame());
    for (std::size_t i = 0; i < increments.size(); ++i) {
      if (mask & (1ull << i)) {
        subset.push_back(i);
        plan = plan_union(plan, increments[i]);
      }
    }
    if (!feasible(plan)) continue;
    ++result.n_feasible;
    require(result.n_feasible <= subset_limit, ErrorCode::SpaceTooLarge,
            "feasible subsets exceed the oracle limit");
    const double value = objective(plan);
    const bool better =
        !have_best || value > result.best_value ||
        (value == result.best_value &&
         std::lexicographical_compare(subset.begin(), subset.end(), result.best_subset.begin(),
                                      result.best_subset.end()));
    if (better) {
      have_best = true;
      result.best_value = value;
      result.best_subset = subset;
    }
  }
  return result;
}

namespace {

double gamma_log_density(double x, const GammaPrior& g) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return g.shape * std::log(g.rate) - std::lgamma(g.shape) + (g.shape - 1.0) * std::log(x) -
         g.rate * x;
}

double gamma_upper_bound(const GammaPrior& g) {
  const double mean = g.shape / g.rate;
  const double sd = std::sqrt(g.shape) / g.rate;
  return mean + 10.0 * sd;
}

}  // namespace

QuadratureMoments quadrature_oracle(const TwoStateCtmcSpec& spec, const Dataset& data,
                                    std::size_t grid_points) {
  require(grid_points >= 10 && grid_points <= 500, ErrorCode::InvalidArgument,
          "quadrature grid must be in [10, 500]");
  const ModelSpec model(spec);
  const double hi_l = gamma_upper_bound(spec.lambda_prior);
  const double hi_m = gamma_upper_bound(spec.mu_prior);
  const double dl = hi_l / static_cast<double>(grid_points - 1);
  const double dm = hi_m / static_cast<double>(grid_points - 1);

  // Log-domain accumulation keeps small evidences stable.
  std::vector<double> lambdas(grid_points), mus(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    lambdas[i] = dl * static_cast<double>(i);
    mus[i] = dm * static_cast<double>(i);
  }
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> grid_log(grid_points, std::vector<double>(grid_points));
  for (std::size_t i = 0; i < grid_points; ++i) {
    for (std::size_t j = 0; j < grid_points; ++j) {
      double lp = gamma_log_density(lambdas[i], spec.lambda_prior) +
                  gamma_log_density(mus[j], spec.mu_prior);
      if (std::isfinite(lp)) {
        Eigen::VectorXd theta(2);
        theta[0] = lambdas[i];
        theta[1] = mus[j];
        lp += log_likelihood(model, ParameterDraw{ModelKind::TwoStateCtmc, theta}, data);
      }
      grid_log[i][j] = lp;
      if (lp > max_log) max_log = lp;
    }
  }
  require(std::isfinite(max_log), ErrorCode::InvalidArgument,
          "quadrature grid carries no posterior mass");
  double z = 0.0, mean_l = 0.0, mean_m = 0.0, m_ll = 0.0, m_mm = 0.0, m_lm = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double wi = (i == 0 || i + 1 == grid_points) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < grid_points; ++j) {
      const double wj = (j == 0 || j + 1 == grid_points) ? 0.5 : 1.0;
      const double density = std::isfinite(grid_log[i][j])
                                 ? std::exp(grid_log[i][j] - max_log)
                                 : 0.0;
      const double w = wi * wj * density;
      z += w;
      mean_l += w * lambdas[i];
      mean_m += w * mus[j];
      m_ll += w * lambdas[i] * lambdas[i];
      m_mm += w * mus[j] * mus[j];
      m_lm += w * lambdas[i] * mus[j];
    }
  }
  QuadratureMoments out;
  out.log_evidence = std::log(z * dl * dm) + max_log;
  mean_l /= z;
  mean_m /= z;
  out.mean << mean_l, mean_m;
  out.cov(0, 0) = m_ll / z - mean_l * mean_l;
  out.cov(1, 1) = m_mm / z - mean_m * mean_m;
  out.cov(0, 1) = out.cov(1, 0) = m_lm / z - mean_l * mean_m;
  return out;
}

double gaussian_log_evidence(const ModelSpec& model, const Dataset& data) {
  // Marginal of the observed vector: N(mean, noise I + design-prior term).
  Eigen::VectorXd obs;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  if (model.kind() == ModelKind::NormalMean) {
    const auto& spec = model.normal_mean();
    std::vector<double> xs;
    for (const auto& [t, v] : data.values()) {
      (void)t;
      xs.push_back(v);
    }
    const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
    obs = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
    mean = Eigen::VectorXd::Constant(n, spec.prior_mean);
    cov = spec.noise_variance * Eigen::MatrixXd::Identity(n, n) +
          spec.prior_variance * Eigen::MatrixXd::Ones(n, n);
  } else {
    require(model.kind() == ModelKind::LinReg, ErrorCode::InvalidArgument,
            "gaussian evidence covers NormalMean and LinReg");
    const auto& spec = model.linreg();
    std::vector<double> ys;
    std::vector<Eigen::Index> rows;
    for (const auto& [t, v] : data.values()) {
      if (t.variable != spec.outcome_variable) continue;
      ys.push_back(v);
      rows.push_back(static_cast<Eigen::Index>(t.unit));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(ys.size());
    Eigen::MatrixXd w(n, spec.prior_mean.size());
    for (Eigen::Index i = 0; i < n; ++i) w.row(i) = spec.covariates.row(rows[i]);
    obs = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    mean = w * spec.prior_mean;
    cov = spec.noise_variance * Eigen::MatrixXd::Identity(n, n) +
          w * spec.prior_cov * w.transpose();
  }
  if (obs.size() == 0) return 0.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::VectorXd diff = obs - mean;
  const Eigen::VectorXd solved = llt.solve(diff);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  }
  return -0.5 * (static_cast<double>(obs.size()) * std::log(2.0 * 3.14159265358979323846) +
                 log_det + diff.dot(solved));
}

Eigen::Matrix2d ctmc_expected_info_fd(const TwoStateCtmcSpec& spec, const MeasurementPlan& plan,
                                      double lambda, double mu, double step) {
  const StudyFrame& frame = *plan.frame();
  const double t_start = frame.time_grid().front();
  std::map<std::uint32_t, std::vector<double>> times_by_unit;
  for (const Triple& t : plan.entries()) {
    times_by_unit[t.unit].push_back(frame.time_at(t.time_index));
  }
  struct Pair {
    double row_prob[2];
    double dt;
  };
  std::vector<Pair> pairs;
  for (auto& [unit, times] : times_by_unit) {
    (void)unit;
    std::sort(times.begin(), times.end());
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      const Eigen::Vector2d row =
          ctmc_state_distribution(spec, lambda, mu, times[i] - t_start);
      pairs.push_back(Pair{{row[0], row[1]}, times[i + 1] - times[i]});
    }
  }
  // Expected log-likelihood of the transition observations; the data law
  // (row marginals and transition frequencies) stays pinned at (lambda, mu)
  // while the likelihood argument moves.
  auto q = [&](double l2, double m2) {
    double total = 0.0;
    for (const Pair& pair : pairs) {
      const Eigen::Matrix2d p_data = ctmc_transition_matrix(lambda, mu, pair.dt).p;
      const Eigen::Matrix2d p_arg = ctmc_transition_matrix(l2, m2, pair.dt).p;
      for (int g = 0; g < 2; ++g) {
        for (int h = 0; h < 2; ++h) {
          if (p_data(g, h) <= 0.0) continue;
          total += pair.row_prob[g] * p_data(g, h) * std::log(p_arg(g, h));
        }
      }
    }
    return total;
  };
  Eigen::Matrix2d hessian;
  const double f0 = q(lambda, mu);
  hessian(0, 0) = (q(lambda + step, mu) - 2.0 * f0 + q(lambda - step, mu)) / (step * step);
  hessian(1, 1) = (q(lambda, mu + step) - 2.0 * f0 + q(lambda, mu - step)) / (step * step);
  const double mixed = (q(lambda + step, mu + step) - q(lambda + step, mu - step) -
                        q(lambda - step, mu + step) + q(lambda - step, mu - step)) /
                       (4.0 * step * step);
  hessian(0, 1) = hessian(1, 0) = mixed;
  return -hessian;
}

double balanced_hierarchy_posterior_variance(double prior_variance, double noise_variance,
                                             const std::vector<double>& omega_sq,
                                             const std::vector<std::size_t>& allocation) {
  require(!allocation.empty(), ErrorCode::InvalidArgument, "allocation must be non-empty");
  require(omega_sq.size() + 1 == allocation.size(), ErrorCode::InvalidArgument,
          "need one omega^2 per level above the units");
  // Information contributed by one node, bottom-up. omega_sq is ordered by
  // hierarchy level: omega_sq[0] for level 2 clusters, omega_sq[1] for level
  // 3, and so on.
  double h = 1.0 / noise_variance;
  for (std::size_t level = allocation.size(); level-- > 1;) {
    const double children = static_cast<double>(allocation[level]);
    const double pooled = children * h;
    h = pooled / (1.0 + omega_sq[allocation.size() - level - 1] * pooled);
  }
  const double total = static_cast<double>(allocation.front()) * h;
  const double prior_precision = prior_variance > 0.0 ? 1.0 / prior_variance : 0.0;
  return 1.0 / (prior_precision + total);
}

}  // namespace odos::testkit
