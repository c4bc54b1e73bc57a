#include "cmawiz/racing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "cmawiz/cma_engine.hpp"
#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

ParamDescriptor ParamDescriptor::real(std::string name, double lower, double upper) {
  return {std::move(name), ParamKind::Real, lower, upper, {}};
}

ParamDescriptor ParamDescriptor::integer(std::string name, int lower, int upper) {
  return {std::move(name), ParamKind::Integer, static_cast<double>(lower), static_cast<double>(upper), {}};
}

ParamDescriptor ParamDescriptor::categorical(std::string name, std::vector<std::string> values) {
  return {std::move(name), ParamKind::Categorical, 0.0, 0.0, std::move(values)};
}

std::size_t ParamSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == name) return i;
  throw Error(ErrorKind::UnknownName, "parameter '" + name + "' not in space");
}

ParamSpace cma_space() {
  return ParamSpace{{
      ParamDescriptor::real("scale", CmaConfig::kMinScale, CmaConfig::kMaxScale),
      ParamDescriptor::integer("popsize_factor", CmaConfig::kMinPopsizeFactor, CmaConfig::kMaxPopsizeFactor),
      ParamDescriptor::categorical("elitist", {"True", "False"}),
      ParamDescriptor::categorical("diagonal", {"True", "False"}),
  }};
}

namespace {

bool categorical_flag(const ParamSpace& space, const Candidate& c, const std::string& name) {
  const std::size_t i = space.index_of(name);
  const auto& values = space.params[i].values;
  const auto k = static_cast<std::size_t>(c.values.at(i));
  if (k >= values.size()) throw Error(ErrorKind::InvalidConfig, "categorical index out of range for " + name);
  const std::string& v = values[k];
  if (v == "True" || v == "true") return true;
  if (v == "False" || v == "false") return false;
  throw Error(ErrorKind::InvalidConfig, "parameter " + name + " is not boolean: " + v);
}

double sample_uniform(const ParamDescriptor& p, std::mt19937_64& rng) {
  switch (p.kind) {
    case ParamKind::Real: {
      std::uniform_real_distribution<double> u(p.lower, p.upper);
      double v = u(rng);
      while (v <= p.lower) v = u(rng);
      return v;
    }
    case ParamKind::Integer:
      return static_cast<double>(
          std::uniform_int_distribution<int>(static_cast<int>(p.lower), static_cast<int>(p.upper))(rng));
    case ParamKind::Categorical:
      return static_cast<double>(std::uniform_int_distribution<std::size_t>(0, p.values.size() - 1)(rng));
  }
  return 0.0;
}

constexpr int kTruncationTries = 100;

double sample_around(const ParamDescriptor& p, double parent, int iteration, std::mt19937_64& rng) {
  const double scale = std::ldexp(1.0, iteration + 1);
  switch (p.kind) {
    case ParamKind::Real: {
      std::normal_distribution<double> normal(parent, (p.upper - p.lower) / scale);
      for (int t = 0; t < kTruncationTries; ++t) {
        const double v = normal(rng);
        if (v > p.lower && v < p.upper) return v;
      }
      return std::clamp(parent, std::nextafter(p.lower, p.upper), std::nextafter(p.upper, p.lower));
    }
    case ParamKind::Integer: {
      std::normal_distribution<double> normal(parent, (p.upper - p.lower) / scale);
      for (int t = 0; t < kTruncationTries; ++t) {
        const double v = std::round(normal(rng));
        if (v >= p.lower && v <= p.upper) return v;
      }
      return std::clamp(std::round(parent), p.lower, p.upper);
    }
    case ParamKind::Categorical: {
      const double keep = 1.0 - std::ldexp(1.0, -iteration);
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < keep) return parent;
      return sample_uniform(p, rng);
    }
  }
  return parent;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::infinity();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Stable ordering by mean loss; ties keep the given order.
std::vector<Candidate> sorted_by_mean(const std::vector<Candidate>& candidates,
                                      const std::map<int, std::vector<double>>& losses) {
  std::vector<Candidate> out = candidates;
  std::stable_sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    return mean_of(losses.at(a.id)) < mean_of(losses.at(b.id));
  });
  return out;
}

}  // namespace

CmaConfig to_cma_config(const ParamSpace& space, const Candidate& candidate) {
  if (candidate.values.size() != space.size())
    throw Error(ErrorKind::InvalidConfig, "candidate does not match the parameter space");
  return CmaConfig(candidate.values.at(space.index_of("scale")),
                   static_cast<int>(std::lround(candidate.values.at(space.index_of("popsize_factor")))),
                   categorical_flag(space, candidate, "elitist"), categorical_flag(space, candidate, "diagonal"));
}

std::string describe_candidate(const ParamSpace& space, const Candidate& candidate) {
  std::ostringstream os;
  os << "#" << candidate.id;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& p = space.params[i];
    os << " " << p.name << "=";
    if (p.kind == ParamKind::Categorical) {
      os << p.values.at(static_cast<std::size_t>(candidate.values[i]));
    } else {
      os << format_real(candidate.values[i]);
    }
  }
  return os.str();
}

void TunerSettings::validate() const {
  if (max_experiments < 1) throw Error(ErrorKind::InvalidConfig, "max_experiments must be >= 1");
  if (first_test_after_blocks < 1) throw Error(ErrorKind::InvalidConfig, "first_test_after_blocks must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
  if (min_survivors < 1) throw Error(ErrorKind::InvalidConfig, "min_survivors must be >= 1");
  if (max_elites < 1) throw Error(ErrorKind::InvalidConfig, "max_elites must be >= 1");
  if (max_candidates < 2) throw Error(ErrorKind::InvalidConfig, "max_candidates must be >= 2");
  if (n_blocks < 0) throw Error(ErrorKind::InvalidConfig, "n_blocks must be >= 0");
}

Target cma_target(const ParamSpace& space) {
  return [space](const Candidate& c, const InstanceSpec& instance, std::uint64_t seed) {
    return run(to_cma_config(space, c), instance, seed).final_loss;
  };
}

PairedTTest paired_t_test(std::span<const double> differences, double alpha) {
  PairedTTest out;
  const auto n = differences.size();
  if (n < 2) return out;
  const double mean = std::accumulate(differences.begin(), differences.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : differences) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.mean_difference = mean;
  if (sd == 0.0 || !std::isfinite(sd)) {
    if (mean == 0.0 || !std::isfinite(mean)) return out;
    out.t_statistic = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    out.worse = mean > 0;
    return out;
  }
  out.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t_statistic)));
  out.worse = out.p_value < alpha && mean > 0;
  return out;
}

std::vector<Candidate> race(const std::vector<Candidate>& candidates, const std::vector<Block>& blocks,
                            const TunerSettings& settings, RaceState& state, const Target& target,
                            long iteration_budget) {
  settings.validate();
  if (candidates.size() < 2) throw Error(ErrorKind::InvalidConfig, "a race needs at least two candidates");

  state.alive = candidates;
  state.losses.clear();
  for (const auto& c : candidates) state.losses[c.id];
  state.blocks_seen = 0;
  long used_in_race = 0;

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& instances = blocks[b].instances;
    const long cost = static_cast<long>(state.alive.size() * instances.size());
    if (used_in_race + cost > iteration_budget || state.experiments_used + cost > settings.max_experiments) break;

    std::vector<std::uint64_t> seeds(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i)
      seeds[i] = derive_seed(settings.seed, state.iteration, b, i);

    const std::size_t width = instances.size();
    std::vector<double> results(state.alive.size() * width);
    parallel_for(results.size(), settings.workers, [&](std::size_t k) {
      results[k] = target(state.alive[k / width], instances[k % width], seeds[k % width]);
    });

    for (std::size_t a = 0; a < state.alive.size(); ++a) {
      auto& row = state.losses[state.alive[a].id];
      for (std::size_t i = 0; i < width; ++i) {
        const double loss = results[a * width + i];
        row.push_back(loss);
        state.log.push_back({state.iteration, static_cast<int>(b), static_cast<int>(i), state.alive[a].id, seeds[i],
                             loss});
      }
    }
    state.experiments_used += cost;
    used_in_race += cost;
    ++state.blocks_seen;

    if (state.blocks_seen < settings.first_test_after_blocks) continue;

    const auto ranked = sorted_by_mean(state.alive, state.losses);
    const Candidate& best = ranked.front();
    const auto& best_row = state.losses.at(best.id);
    std::vector<Candidate> kept;
    for (const auto& c : state.alive) {
      if (c.id == best.id) {
        kept.push_back(c);
        continue;
      }
      const auto& row = state.losses.at(c.id);
      std::vector<double> diffs(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) diffs[i] = row[i] - best_row[i];
      const PairedTTest test = paired_t_test(diffs, settings.alpha);
      if (test.worse) {
        state.eliminations.push_back(
            {state.iteration, c.id, best.id, state.blocks_seen, test.t_statistic, test.p_value});
      } else {
        kept.push_back(c);
      }
    }
    state.alive = std::move(kept);
    if (static_cast<int>(state.alive.size()) <= settings.min_survivors) break;
  }

  return sorted_by_mean(state.alive, state.losses);
}

std::vector<Candidate> sample_initial(const ParamSpace& space, int n, std::uint64_t seed, int first_id) {
  std::mt19937_64 rng(derive_seed(seed, 0x1417));
  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) {
    Candidate c;
    c.id = first_id + k;
    for (const auto& p : space.params) c.values.push_back(sample_uniform(p, rng));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> refine(const std::vector<Candidate>& elites, const ParamSpace& space, int iteration,
                              int n_new, std::uint64_t seed, int first_id) {
  if (elites.empty()) throw Error(ErrorKind::InvalidConfig, "refine needs at least one elite");
  std::mt19937_64 rng(derive_seed(seed, 0x2e1, iteration));
  std::uniform_int_distribution<std::size_t> pick(0, elites.size() - 1);
  std::vector<Candidate> out;
  for (int k = 0; k < n_new; ++k) {
    const Candidate& parent = elites[pick(rng)];
    Candidate c;
    c.id = first_id + k;
    c.parent = parent.id;
    c.born_iteration = iteration + 1;
    for (std::size_t i = 0; i < space.size(); ++i)
      c.values.push_back(sample_around(space.params[i], parent.values.at(i), iteration, rng));
    out.push_back(std::move(c));
  }
  return out;
}

int iteration_count(const ParamSpace& space) {
  return 2 + static_cast<int>(std::lround(std::log2(static_cast<double>(std::max<std::size_t>(space.size(), 1)))));
}

TuneResult tune(const ParamSpace& space, const SuiteSpec& suite, const TunerSettings& settings,
                const Target& target) {
  settings.validate();
  const long per_block = static_cast<long>(generate_suite(suite, 1, settings.seed).front().instances.size());
  const long test_horizon = per_block * (settings.first_test_after_blocks + 2);

  TuneResult result;
  result.iterations = iteration_count(space);
  RaceState& state = result.state;

  const auto candidate_count = [&](long budget) {
    return static_cast<int>(std::min<long>(budget / test_horizon, settings.max_candidates));
  };

  const long first_budget = settings.max_experiments / result.iterations;
  if (candidate_count(first_budget) < 2)
    throw Error(ErrorKind::InvalidConfig,
                "max_experiments " + std::to_string(settings.max_experiments) +
                    " cannot race two candidates through the first test (need at least " +
                    std::to_string(2 * test_horizon * result.iterations) + ")");

  // Cumulative loss tallies across races, for the final ranking.
  std::map<int, std::pair<double, long>> tally;
  std::map<int, Candidate> by_id;
  int next_id = 0;

  for (int j = 1; j <= result.iterations; ++j) {
    state.iteration = j;
    const long remaining = settings.max_experiments - state.experiments_used;
    const long budget = remaining / (result.iterations - j + 1);
    const int total = candidate_count(budget);

    std::vector<Candidate> entrants = state.elites;
    if (j == 1) {
      entrants = sample_initial(space, total, derive_seed(settings.seed, 0x5a, j), next_id);
    } else {
      const int n_new = total - static_cast<int>(state.elites.size());
      if (n_new < 1) break;
      auto fresh = refine(state.elites, space, j - 1, n_new, derive_seed(settings.seed, 0x5a, j), next_id);
      entrants.insert(entrants.end(), fresh.begin(), fresh.end());
    }
    for (const auto& c : entrants) {
      by_id[c.id] = c;
      next_id = std::max(next_id, c.id + 1);
    }
    if (entrants.size() < 2) break;

    // Fresh instances each iteration, as many blocks as the budget affords
    // without eliminations, visited in increasing budget order.
    const long affordable = budget / (static_cast<long>(entrants.size()) * per_block);
    const int n_blocks = settings.n_blocks > 0
                             ? settings.n_blocks
                             : static_cast<int>(std::max<long>(affordable, settings.first_test_after_blocks + 2));
    const auto blocks = order_blocks(generate_suite(suite, n_blocks, derive_seed(settings.seed, 0xb10c, j)));

    const auto survivors = race(entrants, blocks, settings, state, target, budget);
    for (const auto& [id, row] : state.losses) {
      auto& t = tally[id];
      t.first += std::accumulate(row.begin(), row.end(), 0.0);
      t.second += static_cast<long>(row.size());
    }
    state.elites.assign(survivors.begin(),
                        survivors.begin() + std::min<std::ptrdiff_t>(settings.max_elites, survivors.size()));
  }

  for (const auto& e : state.elites) {
    const auto& t = tally[e.id];
    const double mean = t.second > 0 ? t.first / static_cast<double>(t.second) : std::numeric_limits<double>::infinity();
    result.elites.push_back({by_id.at(e.id), mean, t.second});
  }
  std::stable_sort(result.elites.begin(), result.elites.end(),
                   [](const RankedElite& a, const RankedElite& b) { return a.mean_loss < b.mean_loss; });
  return result;
}

TuneResult tune(const ParamSpace& space, const SuiteSpec& suite, const TunerSettings& settings) {
  return tune(space, suite, settings, cma_target(space));
}

}  // namespace cmawiz
