#include "cmawiz/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

namespace {

constexpr double kCondition = 1e6;

double ellipsoid(const Vector& z) {
  const auto d = z.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double exponent = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
    sum += std::pow(kCondition, exponent) * z[i] * z[i];
  }
  return sum;
}

double rosenbrock(const Vector& z) {
  // Optimum moved from (1,...,1) to the origin.
  const auto d = z.size();
  if (d == 1) return z[0] * z[0];
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double a = z[i] + 1.0;
    const double b = z[i + 1] + 1.0;
    sum += 100.0 * (b - a * a) * (b - a * a) + (a - 1.0) * (a - 1.0);
  }
  return sum;
}

double rastrigin(const Vector& z) {
  double sum = 10.0 * static_cast<double>(z.size());
  for (double v : z) sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return std::max(sum, 0.0);
}

double ackley(const Vector& z) {
  const double n = static_cast<double>(z.size());
  double sq = 0.0;
  double cs = 0.0;
  for (double v : z) {
    sq += v * v;
    cs += std::cos(2.0 * std::numbers::pi * v);
  }
  // Grouped so that z = 0 cancels exactly.
  const double e = std::exp(1.0);
  const double value = 20.0 * (1.0 - std::exp(-0.2 * std::sqrt(sq / n))) + (e - std::exp(cs / n));
  return std::max(value, 0.0);
}

double schwefel12(const Vector& z) {
  double partial = 0.0;
  double sum = 0.0;
  for (double v : z) {
    partial += v;
    sum += partial * partial;
  }
  return sum;
}

double sharp_ridge(const Vector& z) {
  double tail = 0.0;
  for (Eigen::Index i = 1; i < z.size(); ++i) tail += z[i] * z[i];
  return z[0] * z[0] + 100.0 * std::sqrt(tail);
}

double different_powers(const Vector& z) {
  const auto d = z.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double exponent = d > 1 ? 2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(d - 1) : 2.0;
    sum += std::pow(std::abs(z[i]), exponent);
  }
  return std::sqrt(sum);
}

double griewank(const Vector& z) {
  double sum = 0.0;
  double prod = 1.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    sum += z[i] * z[i] / 4000.0;
    prod *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return std::max(1.0 + sum - prod, 0.0);
}

long log_uniform_int(std::mt19937_64& rng, long lo, long hi) {
  if (hi <= lo) return lo;
  std::uniform_real_distribution<double> u(std::log(static_cast<double>(lo)),
                                           std::log(static_cast<double>(hi) + 1.0));
  const long v = static_cast<long>(std::floor(std::exp(u(rng))));
  return std::clamp(v, lo, hi);
}

}  // namespace

bool Box::contains(const Vector& x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Box symmetric_box(int dimension, double half_width) {
  return Box{Vector::Constant(dimension, -half_width), Vector::Constant(dimension, half_width)};
}

const std::vector<FunctionDescriptor>& function_catalog() {
  static const std::vector<FunctionDescriptor> catalog = {
      {FunctionId::Sphere, "sphere", false, "unimodal-separable"},
      {FunctionId::Ellipsoid, "ellipsoid", false, "unimodal-separable"},
      {FunctionId::RotatedEllipsoid, "rotated-ellipsoid", true, "unimodal-ill-conditioned"},
      {FunctionId::Rosenbrock, "rosenbrock", true, "unimodal-ill-conditioned"},
      {FunctionId::Rastrigin, "rastrigin", true, "multimodal"},
      {FunctionId::Ackley, "ackley", true, "multimodal"},
      {FunctionId::Schwefel12, "schwefel-1.2", true, "unimodal-ill-conditioned"},
      {FunctionId::SharpRidge, "sharp-ridge", true, "unimodal-ill-conditioned"},
      {FunctionId::DifferentPowers, "different-powers", true, "unimodal-ill-conditioned"},
      {FunctionId::Griewank, "griewank", true, "multimodal"},
  };
  return catalog;
}

const FunctionDescriptor& describe(FunctionId id) {
  for (const auto& f : function_catalog())
    if (f.id == id) return f;
  throw Error(ErrorKind::UnknownName, "unknown function id");
}

FunctionId function_from_name(const std::string& name) {
  for (const auto& f : function_catalog())
    if (f.name == name) return f.id;
  throw Error(ErrorKind::UnknownName, "unknown function '" + name + "'");
}

double base_function(FunctionId id, const Vector& z) {
  switch (id) {
    case FunctionId::Sphere:
      return z.squaredNorm();
    case FunctionId::Ellipsoid:
    case FunctionId::RotatedEllipsoid:
      return ellipsoid(z);
    case FunctionId::Rosenbrock:
      return rosenbrock(z);
    case FunctionId::Rastrigin:
      return rastrigin(z);
    case FunctionId::Ackley:
      return ackley(z);
    case FunctionId::Schwefel12:
      return schwefel12(z);
    case FunctionId::SharpRidge:
      return sharp_ridge(z);
    case FunctionId::DifferentPowers:
      return different_powers(z);
    case FunctionId::Griewank:
      return griewank(z);
  }
  throw Error(ErrorKind::UnknownName, "unknown function id");
}

std::string instance_key(const InstanceSpec& spec) {
  std::ostringstream os;
  os << describe(spec.function).name << ";d=" << spec.dimension << ";r=" << spec.rotation_seed
     << ";b=" << spec.budget << ";w=" << spec.num_workers;
  if (spec.box) {
    os << ";box=";
    for (Eigen::Index i = 0; i < spec.box->lower.size(); ++i)
      os << (i ? "," : "") << format_real(spec.box->lower[i]) << ":" << format_real(spec.box->upper[i]);
  }
  return os.str();
}

std::string instance_hash(const InstanceSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(instance_key(spec))));
  return buf;
}

void validate_instance(const InstanceSpec& spec) {
  if (spec.dimension < 1) throw Error(ErrorKind::InvalidConfig, "instance dimension must be >= 1");
  if (spec.budget < 1) throw Error(ErrorKind::InvalidConfig, "instance budget must be >= 1");
  if (spec.num_workers < 1) throw Error(ErrorKind::InvalidConfig, "instance num_workers must be >= 1");
  if (spec.box) {
    if (spec.box->lower.size() != spec.dimension || spec.box->upper.size() != spec.dimension)
      throw Error(ErrorKind::DimensionMismatch, "box dimension does not match instance dimension");
    if (!(spec.box->lower.array() < spec.box->upper.array()).all())
      throw Error(ErrorKind::InvalidDomain, "degenerate box: lower >= upper in some coordinate");
  }
}

Matrix random_rotation(int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0x0707));
  std::normal_distribution<double> normal;
  Matrix g(dimension, dimension);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dimension; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Vector optimum_shift(int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 0x5151));
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  Vector s(dimension);
  for (auto& v : s) v = u(rng);
  return s;
}

Problem::Problem(InstanceSpec spec) : spec_(std::move(spec)) {
  validate_instance(spec_);
  shift_ = optimum_shift(spec_.dimension, spec_.rotation_seed);
  identity_rotation_ = !describe(spec_.function).rotated;
  rotation_ = identity_rotation_ ? Matrix::Identity(spec_.dimension, spec_.dimension)
                                 : random_rotation(spec_.dimension, spec_.rotation_seed);
}

double Problem::operator()(const Vector& x) const {
  if (x.size() != spec_.dimension)
    throw Error(ErrorKind::DimensionMismatch, "point has dimension " + std::to_string(x.size()) +
                                                  ", instance expects " + std::to_string(spec_.dimension));
  const Vector centered = (spec_.box ? spec_.box->clip(x) : x) - shift_;
  if (identity_rotation_) return base_function(spec_.function, centered);
  return base_function(spec_.function, rotation_ * centered);
}

double evaluate(const InstanceSpec& spec, const Vector& x) { return Problem(spec)(x); }

std::string SuiteSpec::context() const {
  std::ostringstream os;
  os << "dimension in [" << min_dimension << "," << max_dimension << "], budget in [" << min_budget << ","
     << max_budget << "], num_workers=" << num_workers << (bounded ? ", box-constrained" : "");
  return os.str();
}

std::vector<std::string> suite_names() {
  return {"YABBOB", "YASMALLBBOB", "YATUNINGBBOB", "YAPARABBOB",
          "YABOUNDEDBBOB", "YABIGBBOB", "YABOXBBOB", "YAHDBBOB"};
}

SuiteSpec suite_by_name(const std::string& name) {
  SuiteSpec s;
  s.name = name;
  if (name == "YABBOB") {
    s.id = SuiteId::YaBbob;
  } else if (name == "YASMALLBBOB") {
    s.id = SuiteId::YaSmallBbob;
    s.min_budget = 1;
    s.max_budget = 49;
  } else if (name == "YATUNINGBBOB") {
    s.id = SuiteId::YaTuningBbob;
    s.max_dimension = 15;
    s.min_budget = 1;
    s.max_budget = 49;
  } else if (name == "YAPARABBOB") {
    s.id = SuiteId::YaParaBbob;
    s.num_workers = 100;
  } else if (name == "YABOUNDEDBBOB") {
    s.id = SuiteId::YaBoundedBbob;
    s.max_dimension = 40;
    s.max_budget = 300;
    s.bounded = true;
  } else if (name == "YABIGBBOB") {
    s.id = SuiteId::YaBigBbob;
    s.min_budget = 40000;
    s.max_budget = 320000;
  } else if (name == "YABOXBBOB") {
    s.id = SuiteId::YaBoxBbob;
    s.max_budget = 3200;
    s.bounded = true;
  } else if (name == "YAHDBBOB") {
    s.id = SuiteId::YaHdBbob;
    s.min_dimension = 100;
    s.max_dimension = 1000;
  } else {
    throw Error(ErrorKind::UnknownName, "unknown suite '" + name + "'");
  }
  return s;
}

long max_population(int dimension) {
  return static_cast<long>(std::floor(4.0 + 9.0 * std::log(static_cast<double>(dimension))));
}

bool satisfies_context(const SuiteSpec& suite, const InstanceSpec& spec) {
  const bool common = spec.dimension >= suite.min_dimension && spec.dimension <= suite.max_dimension &&
                      spec.budget >= suite.min_budget && spec.budget <= suite.max_budget &&
                      spec.budget >= max_population(spec.dimension) && spec.num_workers == suite.num_workers &&
                      spec.fully_bounded() == suite.bounded;
  if (!common) return false;
  switch (suite.id) {
    case SuiteId::YaBbob:
      return spec.dimension >= 2 && spec.dimension <= 50 && spec.budget >= 50 && spec.budget <= 12800;
    case SuiteId::YaSmallBbob:
      return spec.budget < 50;
    case SuiteId::YaTuningBbob:
      return spec.budget < 50 && spec.dimension <= 15;
    case SuiteId::YaParaBbob:
      return spec.num_workers == 100;
    case SuiteId::YaBoundedBbob:
      return spec.fully_bounded() && spec.budget <= 300 && spec.dimension <= 40;
    case SuiteId::YaBigBbob:
      return spec.budget >= 40000 && spec.budget <= 320000;
    case SuiteId::YaBoxBbob:
      return spec.fully_bounded();
    case SuiteId::YaHdBbob:
      return spec.dimension >= 100 && spec.dimension <= 3000;
  }
  return false;
}

std::vector<Block> generate_suite(const SuiteSpec& suite, int n_blocks, std::uint64_t seed) {
  if (n_blocks < 1) throw Error(ErrorKind::InvalidConfig, "n_blocks must be >= 1");
  if (suite.min_dimension < 1 || suite.max_dimension < suite.min_dimension)
    throw Error(ErrorKind::InvalidConfig, "suite " + suite.name + ": empty dimension range");
  std::vector<FunctionId> functions = suite.functions;
  if (functions.empty())
    for (const auto& f : function_catalog()) functions.push_back(f.id);

  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n_blocks));
  for (int b = 0; b < n_blocks; ++b) {
    std::mt19937_64 rng(derive_seed(seed, fnv1a64(suite.name), b));
    const int dim = static_cast<int>(log_uniform_int(rng, suite.min_dimension, suite.max_dimension));
    const long lo = std::max(suite.min_budget, max_population(dim));
    if (lo > suite.max_budget)
      throw Error(ErrorKind::InvalidConfig, "suite " + suite.name + ": no admissible budget for dimension " +
                                                std::to_string(dim));
    const long budget = log_uniform_int(rng, lo, suite.max_budget);
    const std::uint64_t rotation_seed = rng();

    Block block;
    for (FunctionId f : functions) {
      InstanceSpec spec;
      spec.function = f;
      spec.dimension = dim;
      spec.rotation_seed = rotation_seed;
      spec.budget = budget;
      spec.num_workers = suite.num_workers;
      if (suite.bounded) spec.box = symmetric_box(dim, suite.box_half_width);
      block.instances.push_back(std::move(spec));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<Block> order_blocks(std::vector<Block> blocks) {
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    if (a.budget() != b.budget()) return a.budget() < b.budget();
    return a.dimension() < b.dimension();
  });
  return blocks;
}

}  // namespace cmawiz
