#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_config.hpp"

namespace cmawiz {

struct NamedConfig {
  std::string name;
  CmaConfig config;
};

enum class VoteMode {
  /// Each run elects the contender winning most instances; the modal run winner wins.
  OverRuns,
  /// Instance wins are pooled over every run before electing.
  Pooled,
};

struct ValidationOptions {
  int n_runs = 10;
  /// Blocks regenerated per run; each block holds one instance per function.
  int n_blocks = 10;
  VoteMode vote = VoteMode::OverRuns;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Final loss of contender c on an instance for a given run seed.
using ContenderLoss = std::function<double(const NamedConfig&, const InstanceSpec&, std::uint64_t)>;

struct ValidationReport {
  std::vector<NamedConfig> contenders;
  /// Contender index per run.
  std::vector<int> per_run_winners;
  /// [run][contender]: instances won, ties split evenly.
  std::vector<std::vector<double>> per_instance_win_counts;
  /// [run][contender]: mean final loss in the run.
  std::vector<std::vector<double>> mean_losses;
  std::vector<int> instances_per_run;
  int overall_winner = 0;
  /// True when the primary vote was tied and the tie-break decided.
  bool tie = false;
  VoteMode vote = VoteMode::OverRuns;

  const NamedConfig& winner() const { return contenders.at(static_cast<std::size_t>(overall_winner)); }
};

/// Contender named "default" holding CmaConfig{}; appended by validate() when no
/// contender already carries the default configuration.
NamedConfig default_contender();

/// Majority-vote validation. Instance winner: smallest final loss (ties split).
/// Overall ties break on total instance wins, then on mean loss, then on order.
ValidationReport validate(std::vector<NamedConfig> contenders, const SuiteSpec& suite,
                          const ValidationOptions& options, const ContenderLoss& loss);
ValidationReport validate(std::vector<NamedConfig> contenders, const SuiteSpec& suite,
                          const ValidationOptions& options);

}  // namespace cmawiz
