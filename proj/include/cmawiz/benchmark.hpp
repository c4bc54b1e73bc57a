#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmawiz {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box; both vectors have the problem dimension.
struct Box {
  Vector lower;
  Vector upper;

  Vector center() const { return 0.5 * (lower + upper); }
  Vector clip(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Vector& x) const;

  bool operator==(const Box& o) const { return lower == o.lower && upper == o.upper; }
};

/// Symmetric box [-half_width, half_width]^dimension.
Box symmetric_box(int dimension, double half_width);

enum class FunctionId {
  Sphere,
  Ellipsoid,
  RotatedEllipsoid,
  Rosenbrock,
  Rastrigin,
  Ackley,
  Schwefel12,
  SharpRidge,
  DifferentPowers,
  Griewank,
};

struct FunctionDescriptor {
  FunctionId id;
  std::string name;
  /// Separable functions are evaluated in the unrotated frame.
  bool rotated;
  std::string category;
};

/// Fixed catalog, in canonical order; one block holds one instance per entry.
const std::vector<FunctionDescriptor>& function_catalog();
const FunctionDescriptor& describe(FunctionId id);
FunctionId function_from_name(const std::string& name);

/// Base function value at z, where z is already rotated and shifted so that the
/// optimum sits at the origin.
double base_function(FunctionId id, const Vector& z);

struct InstanceSpec {
  FunctionId function = FunctionId::Sphere;
  int dimension = 1;
  std::uint64_t rotation_seed = 0;
  long budget = 1;
  int num_workers = 1;
  /// Present iff the instance is fully bounded.
  std::optional<Box> box;

  bool fully_bounded() const { return box.has_value(); }
  bool operator==(const InstanceSpec& o) const = default;
};

/// Canonical text identity of an instance; stable across runs and platforms.
std::string instance_key(const InstanceSpec& spec);
std::string instance_hash(const InstanceSpec& spec);

/// Checks field ranges and the bounded/box consistency rule.
void validate_instance(const InstanceSpec& spec);

/// Materialized instance: rotation and planted optimum are computed once.
class Problem {
 public:
  explicit Problem(InstanceSpec spec);

  const InstanceSpec& spec() const { return spec_; }
  const Vector& shift() const { return shift_; }
  /// Identity for separable functions.
  const Matrix& rotation() const { return rotation_; }

  /// loss = f(R (clip(x) - shift)); throws on dimension mismatch.
  double operator()(const Vector& x) const;

 private:
  InstanceSpec spec_;
  Vector shift_;
  Matrix rotation_;
  bool identity_rotation_;
};

/// One-shot evaluation; prefer Problem when evaluating repeatedly.
double evaluate(const InstanceSpec& spec, const Vector& x);

/// Haar-distributed orthogonal matrix from a seeded Gaussian QR.
Matrix random_rotation(int dimension, std::uint64_t seed);
/// Planted optimum, uniform in [-4, 4]^dimension.
Vector optimum_shift(int dimension, std::uint64_t seed);

struct Block {
  std::vector<InstanceSpec> instances;

  int dimension() const { return instances.front().dimension; }
  long budget() const { return instances.front().budget; }
};

enum class SuiteId {
  YaBbob,
  YaSmallBbob,
  YaTuningBbob,
  YaParaBbob,
  YaBoundedBbob,
  YaBigBbob,
  YaBoxBbob,
  YaHdBbob,
};

struct SuiteSpec {
  SuiteId id = SuiteId::YaBbob;
  std::string name;
  int min_dimension = 2;
  int max_dimension = 50;
  long min_budget = 50;
  long max_budget = 12800;
  int num_workers = 1;
  bool bounded = false;
  double box_half_width = 5.0;
  /// Restricts the catalog; empty means every function.
  std::vector<FunctionId> functions;

  std::string context() const;
};

std::vector<std::string> suite_names();
/// Default context for a named suite; throws UnknownName.
SuiteSpec suite_by_name(const std::string& name);
/// Suite-specific membership predicate over generated instances.
bool satisfies_context(const SuiteSpec& suite, const InstanceSpec& spec);

/// Largest population any Table-3 configuration may request in dimension d;
/// budgets are never sampled below it, so every configuration is runnable.
long max_population(int dimension);

std::vector<Block> generate_suite(const SuiteSpec& suite, int n_blocks, std::uint64_t seed);

/// Stable sort by (budget, dimension), both ascending.
std::vector<Block> order_blocks(std::vector<Block> blocks);

}  // namespace cmawiz
