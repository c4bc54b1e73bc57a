#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_config.hpp"

namespace cmawiz {

enum class ParamKind { Real, Integer, Categorical };

struct ParamDescriptor {
  std::string name;
  ParamKind kind = ParamKind::Real;
  /// Reals sample the open interval (lower, upper); integers the closed one.
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::string> values;

  static ParamDescriptor real(std::string name, double lower, double upper);
  static ParamDescriptor integer(std::string name, int lower, int upper);
  static ParamDescriptor categorical(std::string name, std::vector<std::string> values);
};

struct ParamSpace {
  std::vector<ParamDescriptor> params;

  std::size_t size() const { return params.size(); }
  /// Throws UnknownName.
  std::size_t index_of(const std::string& name) const;
};

/// scale real (0.1, 10); popsize_factor integer [1, 9]; elitist and diagonal
/// categorical {True, False}.
ParamSpace cma_space();

/// A point of a ParamSpace. Categorical values are stored as indices into the
/// descriptor's value list.
struct Candidate {
  int id = 0;
  std::vector<double> values;
  /// Id of the elite this candidate was sampled around, -1 for initial samples.
  int parent = -1;
  int born_iteration = 1;
};

/// Maps a candidate of cma_space() (or any space with the same parameter names)
/// onto a CmaConfig; throws InvalidConfig on out-of-domain values.
CmaConfig to_cma_config(const ParamSpace& space, const Candidate& candidate);
std::string describe_candidate(const ParamSpace& space, const Candidate& candidate);

struct TunerSettings {
  long max_experiments = 10000;
  int first_test_after_blocks = 5;
  double alpha = 0.05;
  int min_survivors = 2;
  /// Survivors carried into the next race.
  int max_elites = 5;
  int max_candidates = 50;
  /// Blocks drawn per iteration; 0 draws as many as the iteration budget
  /// affords for its entrants (at least first_test_after_blocks + 2).
  int n_blocks = 0;
  std::uint64_t seed = 0;
  /// Wall-clock knob only; results never depend on it.
  std::size_t workers = 1;

  void validate() const;
};

/// Loss of one experiment: the candidate's recommended-point objective value on
/// the instance, for a given run seed.
using Target = std::function<double(const Candidate&, const InstanceSpec&, std::uint64_t)>;

/// Runs the CMA engine with the candidate's configuration.
Target cma_target(const ParamSpace& space);

struct ExperimentEntry {
  int iteration;
  int block;
  int instance;
  int candidate;
  std::uint64_t seed;
  double loss;
};

struct EliminationEvent {
  int iteration;
  int candidate;
  int against;
  int blocks_seen;
  double t_statistic;
  double p_value;
};

struct RaceState {
  std::vector<Candidate> alive;
  /// Per candidate id: losses on this race's instances in visiting order.
  std::map<int, std::vector<double>> losses;
  int blocks_seen = 0;
  long experiments_used = 0;
  int iteration = 0;
  std::vector<Candidate> elites;

  std::vector<ExperimentEntry> log;
  std::vector<EliminationEvent> eliminations;
};

struct PairedTTest {
  double t_statistic = 0.0;
  double p_value = 1.0;
  double mean_difference = 0.0;
  /// True when the first sample is significantly worse (larger) at level alpha.
  bool worse = false;
};

/// Two-sided paired t-test on differences (candidate - incumbent). All-zero
/// differences never reject; constant non-zero differences reject by sign.
PairedTTest paired_t_test(std::span<const double> differences, double alpha);

/// Races candidates over ordered blocks. Every alive candidate runs once on
/// every instance of a block; from block first_test_after_blocks on, after each
/// block, candidates significantly worse than the lowest-mean incumbent are
/// dropped. A block is only started if the whole block fits in both the
/// iteration budget and the global experiment budget. Returns the survivors
/// ordered by mean loss.
std::vector<Candidate> race(const std::vector<Candidate>& candidates, const std::vector<Block>& blocks,
                            const TunerSettings& settings, RaceState& state, const Target& target,
                            long iteration_budget);

std::vector<Candidate> sample_initial(const ParamSpace& space, int n, std::uint64_t seed, int first_id = 0);

/// New candidates around uniformly chosen elites: truncated normal with sd
/// (upper - lower) / 2^(iteration + 1) for numeric parameters, parent value kept
/// with probability 1 - 0.5^iteration for categoricals.
std::vector<Candidate> refine(const std::vector<Candidate>& elites, const ParamSpace& space, int iteration,
                              int n_new, std::uint64_t seed, int first_id = 0);

/// 2 + round(log2(#parameters)).
int iteration_count(const ParamSpace& space);

struct RankedElite {
  Candidate candidate;
  double mean_loss;
  long instances;
};

struct TuneResult {
  std::vector<RankedElite> elites;
  RaceState state;
  int iterations = 0;
};

/// Elitist iterated racing. Throws InvalidConfig when the budget cannot afford
/// two candidates through the first elimination test plus two blocks.
TuneResult tune(const ParamSpace& space, const SuiteSpec& suite, const TunerSettings& settings,
                const Target& target);
TuneResult tune(const ParamSpace& space, const SuiteSpec& suite, const TunerSettings& settings);

}  // namespace cmawiz
