#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_config.hpp"

namespace cmawiz {

struct HistoryPoint {
  long evaluations;
  double best_loss;

  bool operator==(const HistoryPoint&) const = default;
};

/// One optimizer execution on one instance.
struct RunRecord {
  /// Comparison identity, e.g. "MetaCMA", "CMAstd", "random-search".
  std::string algorithm;
  /// Concrete arm actually executed (the dispatched config name for wizard runs).
  std::string variant;
  /// Suite the instance was drawn from; empty for ad-hoc runs.
  std::string suite;
  std::optional<CmaConfig> config;
  InstanceSpec instance;
  std::uint64_t seed = 0;
  std::vector<HistoryPoint> history;
  Vector recommendation;
  double final_loss = 0.0;

  bool operator==(const RunRecord& o) const;
};

/// Best-so-far loss after `evaluations` evaluations; +inf before the first entry.
double best_loss_at(const std::vector<HistoryPoint>& history, long evaluations);

/// Single-line structured encoding (no trailing newline).
std::string serialize_record(const RunRecord& record);
RunRecord parse_record(const std::string& line);

}  // namespace cmawiz
