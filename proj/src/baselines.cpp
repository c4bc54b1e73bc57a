#include "cmawiz/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

namespace {

/// Evaluation counter with best-so-far bookkeeping.
class Tracker {
 public:
  Tracker(const InstanceSpec& instance, RunRecord& record) : problem_(instance), record_(record) {}

  long used() const { return used_; }
  bool exhausted() const { return used_ >= problem_.spec().budget; }

  double operator()(const Vector& x) {
    const double loss = problem_(x);
    ++used_;
    if (loss < best_ || best_point_.size() == 0) {
      best_ = loss;
      best_point_ = x;
      record_.history.push_back({used_, best_});
    } else if (exhausted()) {
      record_.history.push_back({used_, best_});
    }
    return loss;
  }

  void finish() {
    record_.recommendation = best_point_;
    record_.final_loss = problem_(best_point_);
  }

 private:
  Problem problem_;
  RunRecord& record_;
  long used_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  Vector best_point_;
};

Vector sample_domain(const InstanceSpec& instance, std::mt19937_64& rng) {
  Vector x(instance.dimension);
  if (instance.box) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = std::uniform_real_distribution<double>(instance.box->lower[i], instance.box->upper[i])(rng);
  } else {
    std::normal_distribution<double> normal;
    for (auto& v : x) v = normal(rng);
  }
  return x;
}

Vector project(const InstanceSpec& instance, Vector x) {
  return instance.box ? instance.box->clip(x) : x;
}

void random_search(const InstanceSpec& instance, std::mt19937_64& rng, Tracker& f) {
  while (!f.exhausted()) f(sample_domain(instance, rng));
}

// (1+1)-ES with the one-fifth success rule.
void one_plus_one(const InstanceSpec& instance, std::mt19937_64& rng, Tracker& f) {
  const Vector stretch = instance.box ? Vector((instance.box->upper - instance.box->lower) / 4.0)
                                      : Vector::Ones(instance.dimension);
  Vector parent = instance.box ? instance.box->center() : Vector::Zero(instance.dimension);
  double parent_loss = f(parent);
  double sigma = 1.0;
  std::normal_distribution<double> normal;
  while (!f.exhausted()) {
    Vector child(instance.dimension);
    for (Eigen::Index i = 0; i < child.size(); ++i) child[i] = parent[i] + sigma * stretch[i] * normal(rng);
    child = project(instance, std::move(child));
    const double loss = f(child);
    if (loss <= parent_loss) {
      parent = std::move(child);
      parent_loss = loss;
      sigma *= std::exp(1.0 / 3.0);
    } else {
      sigma *= std::exp(-1.0 / 12.0);
    }
  }
}

// DE/rand/1/bin.
void differential_evolution(const InstanceSpec& instance, std::mt19937_64& rng, Tracker& f) {
  constexpr double kWeight = 0.8;
  constexpr double kCrossover = 0.9;
  const long size = std::min<long>(instance.budget, std::clamp(2L * instance.dimension, 10L, 30L));
  std::vector<Vector> pop;
  std::vector<double> losses;
  for (long k = 0; k < size && !f.exhausted(); ++k) {
    pop.push_back(sample_domain(instance, rng));
    losses.push_back(f(pop.back()));
  }
  if (pop.size() < 4) {
    random_search(instance, rng, f);
    return;
  }
  const auto n = static_cast<int>(pop.size());
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> pick_dim(0, instance.dimension - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int target = 0; !f.exhausted(); target = (target + 1) % n) {
    int a, b, c;
    do a = pick(rng); while (a == target);
    do b = pick(rng); while (b == target || b == a);
    do c = pick(rng); while (c == target || c == a || c == b);
    Vector trial = pop[static_cast<std::size_t>(target)];
    const int forced = pick_dim(rng);
    for (int i = 0; i < instance.dimension; ++i) {
      if (i == forced || unit(rng) < kCrossover)
        trial[i] = pop[static_cast<std::size_t>(a)][i] +
                   kWeight * (pop[static_cast<std::size_t>(b)][i] - pop[static_cast<std::size_t>(c)][i]);
    }
    trial = project(instance, std::move(trial));
    const double loss = f(trial);
    if (loss <= losses[static_cast<std::size_t>(target)]) {
      pop[static_cast<std::size_t>(target)] = std::move(trial);
      losses[static_cast<std::size_t>(target)] = loss;
    }
  }
}

}  // namespace

const std::vector<std::string>& baseline_names() {
  static const std::vector<std::string> names = {"random-search", "one-plus-one-es", "differential-evolution"};
  return names;
}

bool is_baseline(const std::string& name) {
  const auto& names = baseline_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunRecord run_baseline(const std::string& name, const InstanceSpec& instance, std::uint64_t seed) {
  if (!is_baseline(name)) throw Error(ErrorKind::UnknownName, "unknown baseline '" + name + "'");
  RunRecord record;
  record.algorithm = name;
  record.variant = name;
  record.instance = instance;
  record.seed = seed;

  Tracker f(instance, record);
  std::mt19937_64 rng(derive_seed(seed, fnv1a64(name)));
  if (name == "random-search") {
    random_search(instance, rng, f);
  } else if (name == "one-plus-one-es") {
    one_plus_one(instance, rng, f);
  } else {
    differential_evolution(instance, rng, f);
  }
  f.finish();
  return record;
}

}  // namespace cmawiz
