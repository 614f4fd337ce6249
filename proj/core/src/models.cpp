#include "odos/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace odos {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double normal_log_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(kTwoPi * variance) - d * d / (2.0 * variance);
}

void validate_normal_mean(const NormalMeanSpec& s) {
  require(s.noise_variance > 0.0, ErrorCode::InvalidArgument, "noise variance must be > 0");
  require(s.prior_variance >= 0.0, ErrorCode::InvalidArgument, "prior variance must be >= 0");
  require(std::isfinite(s.prior_mean), ErrorCode::InvalidArgument, "prior mean must be finite");
}

void validate_linreg(const LinRegSpec& s) {
  require(s.noise_variance > 0.0, ErrorCode::InvalidArgument, "noise variance must be > 0");
  const auto q = s.prior_mean.size();
  require(q >= 1, ErrorCode::InvalidArgument, "linreg needs at least one coefficient");
  require(s.prior_cov.rows() == q && s.prior_cov.cols() == q, ErrorCode::InvalidArgument,
          "prior covariance must be q x q");
  require((s.prior_cov - s.prior_cov.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
          ErrorCode::InvalidArgument, "prior covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(s.prior_cov);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument,
          "prior covariance must be positive definite");
  require(s.covariates.rows() >= 1 && s.covariates.cols() == q, ErrorCode::InvalidArgument,
          "covariate matrix must be N x q");
}

void validate_gamma(const GammaPrior& g, const char* name) {
  require(g.shape > 0.0 && g.rate > 0.0, ErrorCode::InvalidArgument,
          std::string(name) + " prior needs shape > 0 and rate > 0");
}

void validate_ctmc(const TwoStateCtmcSpec& s) {
  validate_gamma(s.lambda_prior, "lambda");
  validate_gamma(s.mu_prior, "mu");
  require(s.initial_dist[0] >= 0.0 && s.initial_dist[1] >= 0.0, ErrorCode::InvalidArgument,
          "initial distribution must be non-negative");
  require(std::abs(s.initial_dist.sum() - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "initial distribution must sum to 1");
}

// --- CTMC trajectory machinery ------------------------------------------------

int flip_state(int s) { return s == 1 ? 2 : 1; }

double exit_rate(double lambda, double mu, int state) { return state == 1 ? lambda : mu; }

// States of the chain at the ascending `queries`, starting in `state` at
// `t_now`. Exact simulation via exponential holding times.
std::vector<int> walk_path(double lambda, double mu, int state, double t_now,
                           const std::vector<double>& queries, Rng& rng) {
  std::vector<int> out;
  out.reserve(queries.size());
  double next_jump = std::numeric_limits<double>::infinity();
  double rate = exit_rate(lambda, mu, state);
  if (rate > 0.0) {
    next_jump = t_now + std::exponential_distribution<double>(rate)(rng);
  }
  for (double q : queries) {
    while (next_jump <= q) {
      t_now = next_jump;
      state = flip_state(state);
      rate = exit_rate(lambda, mu, state);
      next_jump = rate > 0.0
                      ? t_now + std::exponential_distribution<double>(rate)(rng)
                      : std::numeric_limits<double>::infinity();
    }
    out.push_back(state);
  }
  return out;
}

int draw_initial_state(const TwoStateCtmcSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return u01(rng) < spec.initial_dist[0] ? 1 : 2;
}

int state_from_value(double v) {
  require(v == 1.0 || v == 2.0, ErrorCode::InvalidArgument,
          "CTMC observations must be the states 1 or 2");
  return static_cast<int>(v);
}

struct TimedState {
  double time;
  int state;
};

// Per-unit prior observations of the state variable, sorted by time.
std::map<std::uint32_t, std::vector<TimedState>> prior_observations(
    const TwoStateCtmcSpec& spec, const Dataset& data) {
  std::map<std::uint32_t, std::vector<TimedState>> out;
  const StudyFrame& frame = *data.frame();
  for (const auto& [t, v] : data.values()) {
    if (t.variable != spec.state_variable) continue;
    out[t.unit].push_back({frame.time_at(t.time_index), state_from_value(v)});
  }
  return out;  // map iteration already time-ordered: triples sort by time last per unit
}

Dataset simulate_ctmc(const TwoStateCtmcSpec& spec, const ParameterDraw& theta,
                      const MeasurementPlan& plan, const Dataset& prior_data, Rng& rng) {
  const double lambda = theta.theta[0];
  const double mu = theta.theta[1];
  const StudyFrame& frame = *plan.frame();
  const double t_start = frame.time_grid().front();

  std::map<std::uint32_t, std::vector<Triple>> by_unit;
  for (const Triple& t : plan.entries()) {
    require(t.variable == spec.state_variable, ErrorCode::InvalidArgument,
            "CTMC plans may only select the state variable");
    by_unit[t.unit].push_back(t);
  }
  auto prior = prior_observations(spec, prior_data);

  std::map<Triple, double> values;
  for (auto& [unit, triples] : by_unit) {
    std::vector<double> times;
    times.reserve(triples.size());
    for (const Triple& t : triples) times.push_back(frame.time_at(t.time_index));

    std::vector<int> states;
    auto prior_it = prior.find(unit);
    if (prior_it == prior.end() || prior_it->second.empty()) {
      states = walk_path(lambda, mu, draw_initial_state(spec, rng), t_start, times, rng);
    } else {
      const auto& history = prior_it->second;
      const TimedState last = history.back();
      if (times.front() > last.time) {
        // Markov property: the continuation depends on the past only through
        // the last observed state.
        states = walk_path(lambda, mu, last.state, last.time, times, rng);
      } else {
        // New times interleave the history: rejection-sample a path that
        // reproduces every prior observation.
        std::vector<double> history_times;
        for (const auto& h : history) history_times.push_back(h.time);
        constexpr int kMaxAttempts = 100000;
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
          std::vector<double> all_times = history_times;
          all_times.insert(all_times.end(), times.begin(), times.end());
          std::sort(all_times.begin(), all_times.end());
          all_times.erase(std::unique(all_times.begin(), all_times.end()), all_times.end());
          std::vector<int> path =
              walk_path(lambda, mu, draw_initial_state(spec, rng), t_start, all_times, rng);
          auto state_at = [&](double time) {
            auto it = std::lower_bound(all_times.begin(), all_times.end(), time);
            return path[static_cast<std::size_t>(it - all_times.begin())];
          };
          accepted = true;
          for (const auto& h : history) {
            if (state_at(h.time) != h.state) {
              accepted = false;
              break;
            }
          }
          if (accepted) {
            states.clear();
            for (double q : times) states.push_back(state_at(q));
          }
        }
        require(accepted, ErrorCode::SimulationFailed,
                "conditional CTMC path rejected too often; history too constraining");
      }
    }
    for (std::size_t i = 0; i < triples.size(); ++i) {
      values.emplace(triples[i], static_cast<double>(states[i]));
    }
  }
  return Dataset(plan.frame(), std::move(values));
}

double ctmc_log_likelihood(const TwoStateCtmcSpec& spec, const ParameterDraw& theta,
                           const Dataset& data) {
  const double lambda = theta.theta[0];
  const double mu = theta.theta[1];
  const double t_start = data.frame()->time_grid().front();
  auto obs = prior_observations(spec, data);
  double total = 0.0;
  for (const auto& [unit, series] : obs) {
    (void)unit;
    const Eigen::Vector2d marginal =
        ctmc_state_distribution(spec, lambda, mu, series.front().time - t_start);
    total += std::log(marginal[series.front().state - 1]);
    for (std::size_t i = 1; i < series.size(); ++i) {
      const double dt = series[i].time - series[i - 1].time;
      const TransitionMatrix tm = ctmc_transition_matrix(lambda, mu, dt);
      total += std::log(tm.p(series[i - 1].state - 1, series[i].state - 1));
    }
  }
  return total;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::NormalMean: return "normal_mean";
    case ModelKind::LinReg: return "linreg";
    case ModelKind::TwoStateCtmc: return "two_state_ctmc";
  }
  return "unknown";
}

ModelSpec::ModelSpec(NormalMeanSpec spec) : value_(std::move(spec)) {
  validate_normal_mean(normal_mean());
}
ModelSpec::ModelSpec(LinRegSpec spec) : value_(std::move(spec)) { validate_linreg(linreg()); }
ModelSpec::ModelSpec(TwoStateCtmcSpec spec) : value_(std::move(spec)) { validate_ctmc(ctmc()); }

ModelKind ModelSpec::kind() const {
  if (std::holds_alternative<NormalMeanSpec>(value_)) return ModelKind::NormalMean;
  if (std::holds_alternative<LinRegSpec>(value_)) return ModelKind::LinReg;
  return ModelKind::TwoStateCtmc;
}

std::size_t ModelSpec::parameter_dim() const {
  switch (kind()) {
    case ModelKind::NormalMean: return 1;
    case ModelKind::LinReg: return static_cast<std::size_t>(linreg().prior_mean.size());
    case ModelKind::TwoStateCtmc: return 2;
  }
  return 0;
}

const NormalMeanSpec& ModelSpec::normal_mean() const {
  require(std::holds_alternative<NormalMeanSpec>(value_), ErrorCode::InvalidArgument,
          "model is not NormalMean");
  return std::get<NormalMeanSpec>(value_);
}
const LinRegSpec& ModelSpec::linreg() const {
  require(std::holds_alternative<LinRegSpec>(value_), ErrorCode::InvalidArgument,
          "model is not LinReg");
  return std::get<LinRegSpec>(value_);
}
const TwoStateCtmcSpec& ModelSpec::ctmc() const {
  require(std::holds_alternative<TwoStateCtmcSpec>(value_), ErrorCode::InvalidArgument,
          "model is not TwoStateCtmc");
  return std::get<TwoStateCtmcSpec>(value_);
}

void validate_draw(const ModelSpec& model, const ParameterDraw& theta) {
  require(theta.kind == model.kind(), ErrorCode::InvalidArgument, "parameter draw model mismatch");
  require(static_cast<std::size_t>(theta.theta.size()) == model.parameter_dim(),
          ErrorCode::DimensionMismatch, "parameter dimension mismatch");
  if (model.kind() == ModelKind::TwoStateCtmc) {
    require(theta.theta[0] >= 0.0 && theta.theta[1] >= 0.0, ErrorCode::InvalidArgument,
            "CTMC intensities must be non-negative");
  }
}

ParameterDraw sample_prior(const ModelSpec& model, Rng& rng) {
  return model.visit([&](const auto& spec) -> ParameterDraw {
    using T = std::decay_t<decltype(spec)>;
    if constexpr (std::is_same_v<T, NormalMeanSpec>) {
      Eigen::VectorXd theta(1);
      if (spec.prior_variance == 0.0) {
        theta[0] = spec.prior_mean;
      } else {
        std::normal_distribution<double> normal(spec.prior_mean, std::sqrt(spec.prior_variance));
        theta[0] = normal(rng);
      }
      return ParameterDraw{ModelKind::NormalMean, std::move(theta)};
    } else if constexpr (std::is_same_v<T, LinRegSpec>) {
      Eigen::LLT<Eigen::MatrixXd> llt(spec.prior_cov);
      std::normal_distribution<double> unit_normal(0.0, 1.0);
      Eigen::VectorXd z(spec.prior_mean.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = unit_normal(rng);
      Eigen::VectorXd theta = spec.prior_mean + llt.matrixL() * z;
      return ParameterDraw{ModelKind::LinReg, std::move(theta)};
    } else {
      std::gamma_distribution<double> lambda_draw(spec.lambda_prior.shape,
                                                  1.0 / spec.lambda_prior.rate);
      std::gamma_distribution<double> mu_draw(spec.mu_prior.shape, 1.0 / spec.mu_prior.rate);
      Eigen::VectorXd theta(2);
      theta[0] = lambda_draw(rng);
      theta[1] = mu_draw(rng);
      return ParameterDraw{ModelKind::TwoStateCtmc, std::move(theta)};
    }
  });
}

Dataset simulate_data(const ModelSpec& model, const ParameterDraw& theta,
                      const MeasurementPlan& plan, Rng& rng) {
  return simulate_data(model, theta, plan, Dataset(plan.frame()), rng);
}

Dataset simulate_data(const ModelSpec& model, const ParameterDraw& theta,
                      const MeasurementPlan& plan, const Dataset& prior_data, Rng& rng) {
  validate_draw(model, theta);
  return model.visit([&](const auto& spec) -> Dataset {
    using T = std::decay_t<decltype(spec)>;
    if constexpr (std::is_same_v<T, NormalMeanSpec>) {
      std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_variance));
      std::map<Triple, double> values;
      for (const Triple& t : plan.entries()) values.emplace(t, theta.theta[0] + noise(rng));
      return Dataset(plan.frame(), std::move(values));
    } else if constexpr (std::is_same_v<T, LinRegSpec>) {
      std::normal_distribution<double> noise(0.0, std::sqrt(spec.noise_variance));
      std::map<Triple, double> values;
      for (const Triple& t : plan.entries()) {
        require(t.variable == spec.outcome_variable, ErrorCode::InvalidArgument,
                "LinReg plans may only select the outcome variable");
        require(static_cast<Eigen::Index>(t.unit) < spec.covariates.rows(), ErrorCode::InvalidArgument,
                "plan unit has no covariate row");
        const double mean = spec.covariates.row(t.unit).dot(theta.theta);
        values.emplace(t, mean + noise(rng));
      }
      return Dataset(plan.frame(), std::move(values));
    } else {
      return simulate_ctmc(spec, theta, plan, prior_data, rng);
    }
  });
}

double log_likelihood(const ModelSpec& model, const ParameterDraw& theta, const Dataset& data) {
  validate_draw(model, theta);
  for (const auto& [t, v] : data.values()) {
    (void)t;
    require(std::isfinite(v), ErrorCode::NonFiniteValue, "observed value is not finite");
  }
  return model.visit([&](const auto& spec) -> double {
    using T = std::decay_t<decltype(spec)>;
    if constexpr (std::is_same_v<T, NormalMeanSpec>) {
      double total = 0.0;
      for (const auto& [t, v] : data.values()) {
        (void)t;
        total += normal_log_density(v, theta.theta[0], spec.noise_variance);
      }
      return total;
    } else if constexpr (std::is_same_v<T, LinRegSpec>) {
      double total = 0.0;
      for (const auto& [t, v] : data.values()) {
        if (t.variable != spec.outcome_variable) continue;
        require(static_cast<Eigen::Index>(t.unit) < spec.covariates.rows(), ErrorCode::InvalidArgument,
                "observed unit has no covariate row");
        const double mean = spec.covariates.row(t.unit).dot(theta.theta);
        total += normal_log_density(v, mean, spec.noise_variance);
      }
      return total;
    } else {
      return ctmc_log_likelihood(spec, theta, data);
    }
  });
}

TransitionMatrix ctmc_transition_matrix(double lambda, double mu, double dt) {
  require(lambda >= 0.0 && mu >= 0.0, ErrorCode::InvalidArgument,
          "intensities must be non-negative");
  require(dt >= 0.0, ErrorCode::InvalidArgument, "dt must be non-negative");
  TransitionMatrix out;
  if (dt == 0.0) return out;
  const double s = lambda + mu;
  if (s == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double decay = -std::expm1(-s * dt);  // 1 - e^{-s dt}, stable for small s dt
  const double p12 = (lambda / s) * decay;
  const double p21 = (mu / s) * decay;
  out.p << 1.0 - p12, p12, p21, 1.0 - p21;
  return out;
}

std::array<Eigen::Matrix2d, 2> ctmc_transition_gradients(double lambda, double mu, double dt) {
  require(lambda >= 0.0 && mu >= 0.0, ErrorCode::InvalidArgument,
          "intensities must be non-negative");
  require(dt >= 0.0, ErrorCode::InvalidArgument, "dt must be non-negative");
  const double s = lambda + mu;
  double f, dfds;  // f = (1 - e^{-s dt}) / s and its derivative in s
  if (s * dt < 1e-8) {
    // series around s = 0: f = dt - s dt^2/2 + s^2 dt^3/6
    f = dt - s * dt * dt / 2.0 + s * s * dt * dt * dt / 6.0;
    dfds = -dt * dt / 2.0 + s * dt * dt * dt / 3.0;
  } else {
    const double e = std::exp(-s * dt);
    f = -std::expm1(-s * dt) / s;
    dfds = (dt * e - f) / s;
  }
  const double dp12_dl = f + lambda * dfds;
  const double dp12_dm = lambda * dfds;
  const double dp21_dm = f + mu * dfds;
  const double dp21_dl = mu * dfds;
  Eigen::Matrix2d dlambda, dmu;
  dlambda << -dp12_dl, dp12_dl, dp21_dl, -dp21_dl;
  dmu << -dp12_dm, dp12_dm, dp21_dm, -dp21_dm;
  return {dlambda, dmu};
}

Eigen::Vector2d ctmc_state_distribution(const TwoStateCtmcSpec& spec, double lambda, double mu,
                                        double elapsed) {
  require(elapsed >= 0.0, ErrorCode::InvalidArgument, "elapsed time must be non-negative");
  const TransitionMatrix tm = ctmc_transition_matrix(lambda, mu, elapsed);
  return tm.p.transpose() * spec.initial_dist;
}

}  // namespace odos
