#include "cmawiz/cma_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

namespace {

constexpr int kBoxResamples = 10;
constexpr double kEigenFloor = 1e-20;
constexpr double kMinSigma = 1e-300;
constexpr double kMaxSigma = 1e300;

}  // namespace

CmaConfig::CmaConfig(double scale, int popsize_factor, bool elitist, bool diagonal)
    : scale_(scale), popsize_factor_(popsize_factor), elitist_(elitist), diagonal_(diagonal) {
  if (!(scale > kMinScale && scale < kMaxScale))
    throw Error(ErrorKind::InvalidConfig, "scale must lie in (0.1, 10), got " + format_real(scale));
  if (popsize_factor < kMinPopsizeFactor || popsize_factor > kMaxPopsizeFactor)
    throw Error(ErrorKind::InvalidConfig,
                "popsize_factor must lie in [1, 9], got " + std::to_string(popsize_factor));
}

std::string CmaConfig::to_string() const {
  std::ostringstream os;
  os << "scale=" << format_real(scale_) << ",popsize_factor=" << popsize_factor_
     << ",elitist=" << (elitist_ ? "true" : "false") << ",diagonal=" << (diagonal_ ? "true" : "false");
  return os.str();
}

int population_size(const CmaConfig& config, int dimension) {
  return static_cast<int>(
      std::floor(4.0 + static_cast<double>(config.popsize_factor()) * std::log(static_cast<double>(dimension))));
}

CmaState::CmaState(const CmaConfig& config, int dimension, std::optional<Box> domain, std::uint64_t seed)
    : config_(config), dim_(dimension), domain_(std::move(domain)), rng_(derive_seed(seed, 0xc3a)) {
  if (dimension < 1) throw Error(ErrorKind::InvalidConfig, "dimension must be >= 1");
  const double n = static_cast<double>(dimension);

  if (domain_) {
    if (domain_->lower.size() != dimension || domain_->upper.size() != dimension)
      throw Error(ErrorKind::DimensionMismatch, "domain dimension does not match problem dimension");
    if (!(domain_->lower.array() < domain_->upper.array()).all())
      throw Error(ErrorKind::InvalidDomain, "degenerate box: lower >= upper in some coordinate");
    offset_ = domain_->center();
    stretch_ = (domain_->upper - domain_->lower) / 4.0;
  } else {
    offset_ = Vector::Zero(dimension);
    stretch_ = Vector::Ones(dimension);
  }

  lambda_ = population_size(config, dimension);
  mu_ = lambda_ / 2;
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) weights_[i] = std::log((lambda_ + 1) / 2.0) - std::log(i + 1.0);
  weights_ /= weights_.sum();
  mueff_ = 1.0 / weights_.squaredNorm();

  cc_ = (4.0 + mueff_ / n) / (n + 4.0 + 2.0 * mueff_ / n);
  cs_ = (mueff_ + 2.0) / (n + mueff_ + 5.0);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mueff_);
  cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) / ((n + 2.0) * (n + 2.0) + mueff_));
  if (config.diagonal()) {
    // Separable CMA learning rates.
    c1_ *= (n + 2.0) / 3.0;
    cmu_ = std::min(1.0 - c1_, cmu_ * (n + 2.0) / 3.0);
  }
  damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (n + 1.0)) - 1.0) + cs_;
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  mean_ = Vector::Zero(dimension);
  sigma_ = config.scale();
  path_sigma_ = Vector::Zero(dimension);
  path_c_ = Vector::Zero(dimension);
  if (config.diagonal()) {
    diag_cov_ = Vector::Ones(dimension);
  } else {
    cov_ = Matrix::Identity(dimension, dimension);
    basis_ = Matrix::Identity(dimension, dimension);
    eig_ = Vector::Ones(dimension);
  }
}

Vector CmaState::to_standard(const Vector& x) const { return (x - offset_).cwiseQuotient(stretch_); }

Vector CmaState::to_original(const Vector& y) const { return offset_ + stretch_.cwiseProduct(y); }

Vector CmaState::mean() const { return to_original(mean_); }

Eigen::Index CmaState::covariance_storage() const { return config_.diagonal() ? diag_cov_.size() : cov_.size(); }

Matrix CmaState::covariance() const {
  if (config_.diagonal()) return diag_cov_.asDiagonal();
  return cov_;
}

double CmaState::min_covariance_eigenvalue() const {
  if (config_.diagonal()) return diag_cov_.minCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Vector CmaState::sample_standard() {
  Vector z(dim_);
  for (auto& v : z) v = normal_(rng_);
  if (config_.diagonal()) return mean_ + sigma_ * diag_cov_.cwiseSqrt().cwiseProduct(z);
  return mean_ + sigma_ * (basis_ * eig_.cwiseSqrt().cwiseProduct(z));
}

std::vector<Vector> CmaState::ask() {
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(lambda_));
  for (int k = 0; k < lambda_; ++k) {
    Vector x = to_original(sample_standard());
    if (domain_) {
      for (int attempt = 1; attempt < kBoxResamples && !domain_->contains(x); ++attempt)
        x = to_original(sample_standard());
      x = domain_->clip(x);
    }
    points.push_back(std::move(x));
  }
  return points;
}

Vector CmaState::whiten(const Vector& v) const {
  if (config_.diagonal()) return v.cwiseQuotient(diag_cov_.cwiseSqrt());
  return basis_ * (basis_.transpose() * v).cwiseQuotient(eig_.cwiseSqrt());
}

void CmaState::update_eigensystem(bool force) {
  const double interval = 1.0 / ((c1_ + cmu_) * dim_ * 10.0);
  if (!force && static_cast<double>(generation_ - eigen_generation_) < interval) return;
  eigen_generation_ = generation_;
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov_);
  if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite()) {
    cov_.setIdentity();
    basis_.setIdentity();
    eig_.setOnes();
    return;
  }
  eig_ = solver.eigenvalues();
  basis_ = solver.eigenvectors();
  const double floor = kEigenFloor * std::max(eig_.maxCoeff(), std::numeric_limits<double>::min());
  if (eig_.minCoeff() < floor) {
    eig_ = eig_.cwiseMax(floor);
    cov_ = basis_ * eig_.asDiagonal() * basis_.transpose();
  }
}

void CmaState::repair_diagonal() {
  if (!diag_cov_.allFinite()) {
    diag_cov_.setOnes();
    return;
  }
  const double floor = kEigenFloor * std::max(diag_cov_.maxCoeff(), std::numeric_limits<double>::min());
  diag_cov_ = diag_cov_.cwiseMax(floor);
}

void CmaState::consider_best(const Vector& x, double loss) {
  if (!best_ || loss < best_->loss) best_ = BestSeen{x, loss};
}

void CmaState::observe(const Vector& point, double loss) {
  if (std::isnan(loss)) throw Error(ErrorKind::InvalidLoss, "loss is NaN");
  ++evals_used_;
  consider_best(point, loss);
}

void CmaState::tell(const std::vector<Vector>& points, const std::vector<double>& losses) {
  if (points.size() != static_cast<std::size_t>(lambda_) || losses.size() != points.size())
    throw Error(ErrorKind::DimensionMismatch, "tell expects exactly lambda = " + std::to_string(lambda_) +
                                                  " points and losses");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (std::isnan(losses[k])) throw Error(ErrorKind::InvalidLoss, "loss of point " + std::to_string(k) + " is NaN");
    if (points[k].size() != dim_) throw Error(ErrorKind::DimensionMismatch, "point dimension mismatch");
  }

  // Steps in the standardized frame, relative to the current mean.
  std::vector<Vector> steps;
  steps.reserve(points.size());
  for (const auto& p : points) steps.push_back((to_standard(p) - mean_) / sigma_);
  std::vector<double> pool_losses = losses;

  const double generation_best = *std::min_element(losses.begin(), losses.end());
  const std::optional<BestSeen> previous_best = best_;
  last_injected_ = false;
  if (config_.elitist() && previous_best && previous_best->loss < generation_best) {
    // The historical best replaces the worst offspring. Its step is clipped in
    // Mahalanobis norm.
    const auto worst = static_cast<std::size_t>(
        std::max_element(pool_losses.begin(), pool_losses.end()) - pool_losses.begin());
    Vector step = (to_standard(previous_best->point) - mean_) / sigma_;
    const double n = static_cast<double>(dim_);
    const double limit = std::sqrt(n) + 2.0 * n / (n + 2.0);
    const double norm = whiten(step).norm();
    if (norm > limit) step *= limit / norm;
    steps[worst] = std::move(step);
    pool_losses[worst] = previous_best->loss;
    last_injected_ = true;
  }

  evals_used_ += static_cast<long>(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) consider_best(points[k], losses[k]);

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pool_losses[a] < pool_losses[b]; });
  last_selected_.clear();
  for (std::size_t idx : order) last_selected_.push_back(pool_losses[idx]);

  Vector step_w = Vector::Zero(dim_);
  for (int i = 0; i < mu_; ++i) step_w += weights_[i] * steps[order[static_cast<std::size_t>(i)]];
  mean_ += sigma_ * step_w;

  path_sigma_ = (1.0 - cs_) * path_sigma_ + std::sqrt(cs_ * (2.0 - cs_) * mueff_) * whiten(step_w);
  const double ps_norm = path_sigma_.norm();
  const double correction = std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * static_cast<double>(generation_ + 1)));
  const bool hsig = ps_norm / correction / chi_n_ < 1.4 + 2.0 / (dim_ + 1.0);
  path_c_ = (1.0 - cc_) * path_c_ + (hsig ? std::sqrt(cc_ * (2.0 - cc_) * mueff_) : 0.0) * step_w;

  const double decay = 1.0 - c1_ - cmu_ + (hsig ? 0.0 : c1_ * cc_ * (2.0 - cc_));
  if (config_.diagonal()) {
    Vector rank_mu = Vector::Zero(dim_);
    for (int i = 0; i < mu_; ++i) rank_mu += weights_[i] * steps[order[static_cast<std::size_t>(i)]].cwiseAbs2();
    diag_cov_ = decay * diag_cov_ + c1_ * path_c_.cwiseAbs2() + cmu_ * rank_mu;
    repair_diagonal();
  } else {
    Matrix rank_mu = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < mu_; ++i) {
      const Vector& s = steps[order[static_cast<std::size_t>(i)]];
      rank_mu.noalias() += weights_[i] * s * s.transpose();
    }
    cov_ = decay * cov_ + c1_ * path_c_ * path_c_.transpose() + cmu_ * rank_mu;
  }

  sigma_ *= std::exp(std::min(1.0, (cs_ / damps_) * (ps_norm / chi_n_ - 1.0)));
  if (!std::isfinite(sigma_)) sigma_ = config_.scale();
  sigma_ = std::clamp(sigma_, kMinSigma, kMaxSigma);

  ++generation_;
  if (!config_.diagonal()) update_eigensystem(false);
}

CmaState init_state(const CmaConfig& config, int dimension, const std::optional<Box>& domain, std::uint64_t seed) {
  return CmaState(config, dimension, domain, seed);
}

RunRecord run(const CmaConfig& config, const InstanceSpec& instance, std::uint64_t seed) {
  const Problem problem(instance);
  CmaState state = init_state(config, instance.dimension, instance.box, seed);
  const long lambda = state.lambda();
  if (instance.budget < lambda)
    throw Error(ErrorKind::BudgetTooSmall, "budget " + std::to_string(instance.budget) +
                                               " is below the population size " + std::to_string(lambda));

  RunRecord record;
  record.algorithm = "CMA";
  record.variant = "CMA";
  record.config = config;
  record.instance = instance;
  record.seed = seed;

  while (state.evals_used() < instance.budget) {
    const std::vector<Vector> points = state.ask();
    const long remaining = instance.budget - state.evals_used();
    if (remaining >= lambda) {
      std::vector<double> losses;
      losses.reserve(points.size());
      for (const auto& p : points) losses.push_back(problem(p));
      state.tell(points, losses);
    } else {
      for (long k = 0; k < remaining; ++k) state.observe(points[static_cast<std::size_t>(k)], problem(points[static_cast<std::size_t>(k)]));
    }
    record.history.push_back({state.evals_used(), state.best_seen()->loss});
  }

  record.recommendation = state.best_seen()->point;
  record.final_loss = problem(record.recommendation);
  return record;
}

}  // namespace cmawiz
