#include "cmawiz/validation.hpp"

#include <algorithm>
#include <numeric>

#include "cmawiz/cma_engine.hpp"
#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

namespace {

/// Index of the best contender: most votes, then most instance wins, then
/// lowest mean loss, then lowest index. `tied` reports a tie on votes.
int elect(const std::vector<double>& votes, const std::vector<double>& wins, const std::vector<double>& mean_loss,
          bool& tied) {
  const auto n = votes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (votes[a] != votes[b]) return votes[a] > votes[b];
    if (wins[a] != wins[b]) return wins[a] > wins[b];
    return mean_loss[a] < mean_loss[b];
  });
  tied = n > 1 && votes[order[0]] == votes[order[1]];
  return static_cast<int>(order.front());
}

}  // namespace

NamedConfig default_contender() { return {"default", CmaConfig{}}; }

ValidationReport validate(std::vector<NamedConfig> contenders, const SuiteSpec& suite,
                          const ValidationOptions& options, const ContenderLoss& loss) {
  if (options.n_runs < 1) throw Error(ErrorKind::InvalidConfig, "n_runs must be >= 1");
  const bool has_default = std::any_of(contenders.begin(), contenders.end(),
                                       [](const NamedConfig& c) { return c.config == CmaConfig{}; });
  if (!has_default) contenders.push_back(default_contender());
  if (contenders.size() < 2) throw Error(ErrorKind::InvalidConfig, "validation needs at least two contenders");

  const std::size_t m = contenders.size();
  ValidationReport report;
  report.contenders = contenders;
  report.vote = options.vote;

  for (int r = 0; r < options.n_runs; ++r) {
    const auto blocks = generate_suite(suite, options.n_blocks, derive_seed(options.seed, 0x7a1, r));
    std::vector<InstanceSpec> instances;
    for (const auto& b : blocks) instances.insert(instances.end(), b.instances.begin(), b.instances.end());

    const std::size_t width = instances.size();
    std::vector<double> losses(m * width);
    parallel_for(losses.size(), options.workers, [&](std::size_t k) {
      const std::size_t i = k % width;
      losses[k] = loss(contenders[k / width], instances[i], derive_seed(options.seed, 0x7a2, r, i));
    });

    std::vector<double> wins(m, 0.0);
    std::vector<double> mean(m, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
      double best = losses[i];
      for (std::size_t c = 1; c < m; ++c) best = std::min(best, losses[c * width + i]);
      std::size_t tied = 0;
      for (std::size_t c = 0; c < m; ++c) tied += losses[c * width + i] == best;
      for (std::size_t c = 0; c < m; ++c)
        if (losses[c * width + i] == best) wins[c] += 1.0 / static_cast<double>(tied);
    }
    for (std::size_t c = 0; c < m; ++c)
      mean[c] = std::accumulate(losses.begin() + static_cast<std::ptrdiff_t>(c * width),
                                losses.begin() + static_cast<std::ptrdiff_t>((c + 1) * width), 0.0) /
                static_cast<double>(width);

    bool tied = false;
    report.per_run_winners.push_back(elect(wins, wins, mean, tied));
    report.per_instance_win_counts.push_back(std::move(wins));
    report.mean_losses.push_back(std::move(mean));
    report.instances_per_run.push_back(static_cast<int>(width));
  }

  std::vector<double> run_votes(m, 0.0);
  std::vector<double> total_wins(m, 0.0);
  std::vector<double> mean_loss(m, 0.0);
  for (int r = 0; r < options.n_runs; ++r) {
    run_votes[static_cast<std::size_t>(report.per_run_winners[static_cast<std::size_t>(r)])] += 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      total_wins[c] += report.per_instance_win_counts[static_cast<std::size_t>(r)][c];
      mean_loss[c] += report.mean_losses[static_cast<std::size_t>(r)][c] / options.n_runs;
    }
  }
  const auto& votes = options.vote == VoteMode::OverRuns ? run_votes : total_wins;
  report.overall_winner = elect(votes, total_wins, mean_loss, report.tie);
  return report;
}

ValidationReport validate(std::vector<NamedConfig> contenders, const SuiteSpec& suite,
                          const ValidationOptions& options) {
  return validate(std::move(contenders), suite, options,
                  [](const NamedConfig& c, const InstanceSpec& instance, std::uint64_t seed) {
                    return run(c.config, instance, seed).final_loss;
                  });
}

}  // namespace cmawiz
