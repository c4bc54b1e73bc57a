#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_config.hpp"
#include "cmawiz/run_record.hpp"

namespace cmawiz {

struct BestSeen {
  Vector point;
  double loss;
};

/// Ask/tell CMA-ES state.
///
/// The search distribution lives in a standardized frame: x = offset + stretch * y,
/// with offset the domain center and stretch (upper - lower) / 4 for boxes (both
/// trivial when unbounded). The reference step is therefore 1 in that frame, and
/// sigma starts at config.scale(). Points exchanged through ask/tell are always in
/// the original frame.
///
/// With config.diagonal() the covariance is stored as a length-d vector and no
/// d x d matrix is ever allocated.
class CmaState {
 public:
  CmaState(const CmaConfig& config, int dimension, std::optional<Box> domain, std::uint64_t seed);

  /// lambda points; for boxes each point is resampled up to 10 times and then clipped.
  std::vector<Vector> ask();

  /// Weighted recombination, CSA step-size control and rank-one + rank-mu update.
  /// Throws InvalidLoss on NaN and DimensionMismatch on size errors.
  void tell(const std::vector<Vector>& points, const std::vector<double>& losses);

  /// Accounts for an evaluation that is not fed back into the distribution
  /// (truncated final generation).
  void observe(const Vector& point, double loss);

  const CmaConfig& config() const { return config_; }
  int dimension() const { return dim_; }
  int lambda() const { return lambda_; }
  int mu() const { return mu_; }

  Vector mean() const;
  double sigma() const { return sigma_; }
  /// Per-coordinate size of a unit step in the original frame.
  const Vector& reference_step() const { return stretch_; }

  bool is_diagonal() const { return config_.diagonal(); }
  /// d*d for the full representation, d for the diagonal one.
  Eigen::Index covariance_storage() const;
  /// Covariance in the standardized frame (materialized on request).
  Matrix covariance() const;
  const Vector& diagonal_covariance() const { return diag_cov_; }
  double min_covariance_eigenvalue() const;

  const Vector& step_path() const { return path_sigma_; }
  const Vector& covariance_path() const { return path_c_; }

  long generation() const { return generation_; }
  long evals_used() const { return evals_used_; }
  const std::optional<BestSeen>& best_seen() const { return best_; }

  /// Losses of the individuals that entered the last recombination, after any
  /// elitist injection, sorted ascending.
  const std::vector<double>& last_selected_losses() const { return last_selected_; }
  bool last_tell_injected() const { return last_injected_; }

 private:
  Vector to_standard(const Vector& x) const;
  Vector to_original(const Vector& y) const;
  Vector sample_standard();
  /// C^{-1/2} v in the standardized frame.
  Vector whiten(const Vector& v) const;
  void update_eigensystem(bool force);
  void repair_diagonal();
  void consider_best(const Vector& x, double loss);

  CmaConfig config_;
  int dim_;
  std::optional<Box> domain_;
  Vector offset_;
  Vector stretch_;

  int lambda_;
  int mu_;
  Vector weights_;
  double mueff_;
  double cc_, cs_, c1_, cmu_, damps_, chi_n_;

  Vector mean_;
  double sigma_;
  Vector path_sigma_;
  Vector path_c_;

  // Full representation: cov_ = B diag(eig_) B^T. Empty when diagonal.
  Matrix cov_;
  Matrix basis_;
  Vector eig_;
  long eigen_generation_ = 0;
  // Diagonal representation. Empty when full.
  Vector diag_cov_;

  long generation_ = 0;
  long evals_used_ = 0;
  std::optional<BestSeen> best_;
  std::vector<double> last_selected_;
  bool last_injected_ = false;

  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

/// Fresh state: mean at the domain center, sigma = scale, identity covariance.
/// Throws InvalidDomain for a degenerate box.
CmaState init_state(const CmaConfig& config, int dimension, const std::optional<Box>& domain,
                    std::uint64_t seed);

/// Full budgeted run. History has one entry per generation boundary; the last
/// generation is truncated to fit the budget. Throws BudgetTooSmall if the
/// budget is below the population size.
RunRecord run(const CmaConfig& config, const InstanceSpec& instance, std::uint64_t seed);

}  // namespace cmawiz
