#include "odos/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odos/parallel.hpp"

namespace odos {

namespace {

void validate_exact(const ExactNormal& e) {
  require(e.mean.size() >= 1, ErrorCode::InvalidArgument, "posterior mean must be non-empty");
  require(e.cov.rows() == e.mean.size() && e.cov.cols() == e.mean.size(),
          ErrorCode::DimensionMismatch, "posterior covariance shape mismatch");
  require((e.cov - e.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
          ErrorCode::InvalidArgument, "posterior covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.cov);
  const double floor = -1e-8 * std::max(1.0, e.cov.trace());
  require(es.eigenvalues().minCoeff() >= floor, ErrorCode::InvalidArgument,
          "posterior covariance must be positive semidefinite");
}

double compute_ess(const std::vector<double>& weights) {
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

void validate_particles(const Particles& p) {
  require(!p.draws.empty(), ErrorCode::InvalidArgument, "particle set must be non-empty");
  require(p.draws.size() == p.weights.size(), ErrorCode::DimensionMismatch,
          "particle draw/weight count mismatch");
  double total = 0.0;
  for (double w : p.weights) {
    require(w > 0.0, ErrorCode::InvalidArgument, "particle weights must be strictly positive");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "particle weights must sum to 1 within 1e-12");
  const auto dim = p.draws.front().size();
  for (const auto& d : p.draws) {
    require(d.size() == dim, ErrorCode::DimensionMismatch, "particle dimension mismatch");
  }
}

// Square root of a PSD matrix via eigendecomposition; tolerates exact zeros
// (degenerate posteriors).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

std::size_t gh_order_for_dim(std::size_t dim) {
  switch (dim) {
    case 1: return 64;
    case 2: return 24;
    case 3: return 12;
    case 4: return 8;
    default:
      fail(ErrorCode::InvalidArgument,
           "quadrature expectation supports posterior dimension <= 4, got " +
               std::to_string(dim));
  }
}

}  // namespace

void gauss_hermite(std::size_t order, std::vector<double>& nodes, std::vector<double>& weights) {
  require(order >= 1, ErrorCode::InvalidArgument, "quadrature order must be >= 1");
  // Golub-Welsch on the Hermite Jacobi matrix: off-diagonals sqrt(i/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (std::size_t i = 1; i < order; ++i) {
    const double b = std::sqrt(static_cast<double>(i) / 2.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes.resize(order);
  weights.resize(order);
  const double sqrt_pi = std::sqrt(3.14159265358979323846);
  for (std::size_t i = 0; i < order; ++i) {
    nodes[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    const double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
    weights[i] = sqrt_pi * v0 * v0;
  }
}

Posterior::Posterior(ExactNormal exact, ModelKind kind) : value_(std::move(exact)), kind_(kind) {
  validate_exact(this->exact());
}

Posterior::Posterior(Particles particles) : kind_(particles.kind) {
  particles.ess = compute_ess(particles.weights);
  value_ = std::move(particles);
  validate_particles(this->particles());
}

const ExactNormal& Posterior::exact() const {
  require(is_exact(), ErrorCode::InvalidArgument, "posterior is not exact-normal");
  return std::get<ExactNormal>(value_);
}

const Particles& Posterior::particles() const {
  require(!is_exact(), ErrorCode::InvalidArgument, "posterior is not a particle set");
  return std::get<Particles>(value_);
}

std::size_t Posterior::dim() const {
  if (is_exact()) return static_cast<std::size_t>(exact().mean.size());
  return static_cast<std::size_t>(particles().draws.front().size());
}

Eigen::VectorXd Posterior::mean() const {
  if (is_exact()) return exact().mean;
  const Particles& p = particles();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < p.draws.size(); ++i) m += p.weights[i] * p.draws[i];
  return m;
}

Eigen::MatrixXd Posterior::covariance() const {
  if (is_exact()) return exact().cov;
  const Particles& p = particles();
  const Eigen::VectorXd m = mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m.size(), m.size());
  for (std::size_t i = 0; i < p.draws.size(); ++i) {
    const Eigen::VectorXd d = p.draws[i] - m;
    cov += p.weights[i] * d * d.transpose();
  }
  return cov;
}

double Posterior::expectation(const std::function<double(const Eigen::VectorXd&)>& f) const {
  if (!is_exact()) {
    const Particles& p = particles();
    double total = 0.0;
    for (std::size_t i = 0; i < p.draws.size(); ++i) total += p.weights[i] * f(p.draws[i]);
    return total;
  }
  const ExactNormal& e = exact();
  const std::size_t dim = static_cast<std::size_t>(e.mean.size());
  const Eigen::MatrixXd root = psd_sqrt(e.cov);
  std::vector<double> nodes, weights;
  gauss_hermite(gh_order_for_dim(dim), nodes, weights);
  const double norm = std::pow(3.14159265358979323846, -0.5 * static_cast<double>(dim));
  const std::size_t order = nodes.size();
  std::vector<std::size_t> idx(dim, 0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      z[static_cast<Eigen::Index>(d)] = nodes[idx[d]];
      w *= weights[idx[d]];
    }
    total += w * f(e.mean + std::sqrt(2.0) * (root * z));
    std::size_t d = 0;
    while (d < dim && ++idx[d] == order) {
      idx[d] = 0;
      ++d;
    }
    if (d == dim) break;
  }
  return total * norm;
}

ParameterDraw Posterior::draw(Rng& rng) const {
  if (is_exact()) {
    const ExactNormal& e = exact();
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    Eigen::VectorXd z(e.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = unit_normal(rng);
    return ParameterDraw{kind_, e.mean + psd_sqrt(e.cov) * z};
  }
  const Particles& p = particles();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < p.draws.size(); ++i) {
    cumulative += p.weights[i];
    if (u < cumulative) return ParameterDraw{kind_, p.draws[i]};
  }
  return ParameterDraw{kind_, p.draws.back()};
}

Posterior posterior_normal_mean(const NormalMeanSpec& model, const Dataset& data) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [t, v] : data.values()) {
    (void)t;
    require(std::isfinite(v), ErrorCode::NonFiniteValue, "observed value is not finite");
    sum += v;
    ++n;
  }
  Eigen::VectorXd mean(1);
  Eigen::MatrixXd cov(1, 1);
  if (model.prior_variance == 0.0) {
    mean[0] = model.prior_mean;
    cov(0, 0) = 0.0;
  } else {
    const double precision =
        1.0 / model.prior_variance + static_cast<double>(n) / model.noise_variance;
    cov(0, 0) = 1.0 / precision;
    mean[0] = cov(0, 0) * (model.prior_mean / model.prior_variance + sum / model.noise_variance);
  }
  return Posterior(ExactNormal{std::move(mean), std::move(cov)}, ModelKind::NormalMean);
}

Posterior posterior_linreg(const LinRegSpec& model, const Dataset& data) {
  const Eigen::Index q = model.prior_mean.size();
  Eigen::MatrixXd prior_precision =
      model.prior_cov.llt().solve(Eigen::MatrixXd::Identity(q, q));
  Eigen::MatrixXd precision = prior_precision;
  Eigen::VectorXd shift = prior_precision * model.prior_mean;
  for (const auto& [t, v] : data.values()) {
    if (t.variable != model.outcome_variable) continue;
    require(std::isfinite(v), ErrorCode::NonFiniteValue, "observed value is not finite");
    require(static_cast<Eigen::Index>(t.unit) < model.covariates.rows(),
            ErrorCode::InvalidArgument, "observed unit has no covariate row");
    const Eigen::VectorXd w = model.covariates.row(t.unit).transpose();
    precision += w * w.transpose() / model.noise_variance;
    shift += w * v / model.noise_variance;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(precision);
  const double min_eig = es.eigenvalues().minCoeff();
  const double max_eig = es.eigenvalues().maxCoeff();
  require(min_eig > 0.0 && max_eig / min_eig < 1e12, ErrorCode::SingularMatrix,
          "posterior precision is numerically singular");
  Eigen::MatrixXd cov = es.eigenvectors() *
                        es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
  cov = ((cov + cov.transpose()) / 2.0).eval();
  Eigen::VectorXd mean = cov * shift;
  return Posterior(ExactNormal{std::move(mean), std::move(cov)}, ModelKind::LinReg);
}

Posterior importance_posterior(const ModelSpec& model, const Dataset& data,
                               std::size_t n_particles, Rng& rng) {
  require(n_particles >= 100, ErrorCode::InvalidArgument, "need at least 100 particles");
  const std::uint64_t base = rng();
  std::vector<Eigen::VectorXd> draws(n_particles);
  std::vector<double> log_weights(n_particles);
  parallel_for(n_particles, [&](std::size_t i) {
    Rng stream = child_rng(base, streams::kPrior, i);
    ParameterDraw theta = sample_prior(model, stream);
    log_weights[i] = log_likelihood(model, theta, data);
    draws[i] = std::move(theta.theta);
  });
  const double max_log = *std::max_element(log_weights.begin(), log_weights.end());
  require(std::isfinite(max_log), ErrorCode::DegenerateWeights,
          "every particle has zero likelihood");
  std::vector<double> weights(n_particles);
  double total = 0.0;
  for (std::size_t i = 0; i < n_particles; ++i) {
    weights[i] = std::exp(log_weights[i] - max_log);
    total += weights[i];
  }
  std::vector<Eigen::VectorXd> kept;
  std::vector<double> kept_weights;
  kept.reserve(n_particles);
  kept_weights.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) {
    const double w = weights[i] / total;
    if (w > 0.0) {
      kept.push_back(std::move(draws[i]));
      kept_weights.push_back(w);
    }
  }
  // Renormalize after dropping zero-weight particles (underflowed likelihoods).
  double kept_total = 0.0;
  for (double w : kept_weights) kept_total += w;
  for (double& w : kept_weights) w /= kept_total;
  Particles particles{model.kind(), std::move(kept), std::move(kept_weights), 0.0};
  const double ess = compute_ess(particles.weights);
  require(ess >= 10.0, ErrorCode::DegenerateWeights,
          "effective sample size " + std::to_string(ess) + " < 10; raise n_particles");
  return Posterior(std::move(particles));
}

}  // namespace odos
