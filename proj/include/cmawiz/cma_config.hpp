#pragma once

#include <string>

namespace cmawiz {

/// The four exposed CMA parameters. Construction enforces the tuning domain:
/// scale in the open interval (0.1, 10), popsize_factor in {1, ..., 9}.
class CmaConfig {
 public:
  static constexpr double kMinScale = 0.1;
  static constexpr double kMaxScale = 10.0;
  static constexpr int kMinPopsizeFactor = 1;
  static constexpr int kMaxPopsizeFactor = 9;

  /// Defaults: scale 1, popsize_factor 3, non-elitist, full covariance.
  CmaConfig() = default;
  CmaConfig(double scale, int popsize_factor, bool elitist, bool diagonal);

  double scale() const { return scale_; }
  int popsize_factor() const { return popsize_factor_; }
  bool elitist() const { return elitist_; }
  bool diagonal() const { return diagonal_; }

  bool operator==(const CmaConfig&) const = default;

  /// e.g. "scale=0.3607,popsize_factor=3,elitist=false,diagonal=false"
  std::string to_string() const;

 private:
  double scale_ = 1.0;
  int popsize_factor_ = 3;
  bool elitist_ = false;
  bool diagonal_ = false;
};

/// floor(4 + popsize_factor * ln(dimension)).
int population_size(const CmaConfig& config, int dimension);

}  // namespace cmawiz
