#pragma once

#include <span>
#include <string>
#include <vector>

#include "cmawiz/run_record.hpp"

namespace cmawiz {

/// Budget fractions at which anytime comparisons are made.
inline const std::vector<double> kDefaultCheckpoints = {0.05, 0.10, 0.25, 0.50, 1.00};

/// Evaluation count for a budget fraction: max(1, floor(fraction * budget)).
long checkpoint_evaluations(double fraction, long budget);

struct ScoreMatrix {
  /// Ordered by rank (best first).
  std::vector<std::string> algorithms;
  /// wins[a][b]: fraction of settings where a beats b, ties counting one half.
  std::vector<std::vector<double>> wins;
  /// Mean of wins[a][b] over b != a (0.5 for a lone algorithm).
  std::vector<double> global_score;
  /// Standard error over settings of the per-setting mean win rate.
  std::vector<double> standard_error;
  /// Number of (instance, seed, checkpoint) settings compared.
  std::size_t settings = 0;

  std::size_t index_of(const std::string& algorithm) const;
};

struct ConvergenceCurve {
  std::string algorithm;
  /// (budget fraction, mean normalized loss in [0, 1]).
  std::vector<std::pair<double, double>> points;
  /// Mean normalized loss at the largest and second-largest checkpoints.
  double final_loss_label = 0.0;
  double second_final_loss_label = 0.0;
};

/// Pairwise anytime win rates. Every algorithm needs a record for every
/// (instance, seed) seen in the collection; gaps throw MissingRecords.
ScoreMatrix score_matrix(std::span<const RunRecord> records, const std::vector<double>& checkpoints = kDefaultCheckpoints);

/// Per (instance, checkpoint), losses across algorithms and seeds are rescaled
/// linearly to [0, 1] (all-equal maps to 0; not-yet-evaluated maps to 1) and
/// averaged over instances and seeds.
std::vector<ConvergenceCurve> convergence_curves(std::span<const RunRecord> records,
                                                 const std::vector<double>& checkpoints = kDefaultCheckpoints);

/// "rank/total:score% +- halfwidth", e.g. "1/18:76.1% +- 0.4".
std::string format_rank_label(const ScoreMatrix& matrix, const std::string& algorithm);

/// Tab-separated data files with a schema header line.
std::string write_score_matrix(const ScoreMatrix& matrix);
ScoreMatrix parse_score_matrix(const std::string& text);
std::string write_curves(const std::vector<ConvergenceCurve>& curves);
std::vector<ConvergenceCurve> parse_curves(const std::string& text);

/// Plain-text heatmap: top `max_rows` algorithms as rows, all as columns.
std::string render_score_table(const ScoreMatrix& matrix, std::size_t max_rows = 6);
std::string render_curves(const std::vector<ConvergenceCurve>& curves);

}  // namespace cmawiz
