#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_config.hpp"
#include "cmawiz/run_record.hpp"

namespace cmawiz {

struct ProblemDescriptor {
  long budget = 1;
  int dimension = 1;
  int num_workers = 1;
  bool fully_bounded = false;

  static ProblemDescriptor from_instance(const InstanceSpec& instance);
};

/// Registry slot names, in serialization order.
inline constexpr std::array<const char*, 5> kConfigNames = {"CMAstd", "CMAsmall", "CMAtuning", "CMApara",
                                                            "CMAbounded"};

/// Name of the slot a training suite tunes ("YABBOB" -> "CMAstd", ...); throws
/// UnknownName for suites that do not feed a slot.
std::string slot_for_suite(const std::string& suite);

class ConfigRegistry {
 public:
  /// The tuned defaults shipped with MetaCMA.
  static ConfigRegistry defaults();

  const CmaConfig& at(const std::string& name) const;
  /// Throws UnknownName for names outside kConfigNames.
  void set(const std::string& name, const CmaConfig& config);

  bool operator==(const ConfigRegistry&) const = default;

 private:
  std::map<std::string, CmaConfig> configs_;
};

/// MetaCMA dispatch on budget, dimension, workers and boundedness; pure and total.
std::string meta_cma_select(const ProblemDescriptor& p);

/// Dispatches and runs; the record is tagged algorithm "MetaCMA" with the chosen
/// slot as variant. Throws InvalidConfig if p disagrees with the instance.
RunRecord wizard_run(const ProblemDescriptor& p, const InstanceSpec& instance, const ConfigRegistry& registry,
                     std::uint64_t seed);

/// Sectioned text: a header line, then one "[name]" section per slot with
/// scale / popsize_factor / elitist / diagonal fields.
std::string serialize_registry(const ConfigRegistry& registry);
/// Missing sections are an error unless allow_partial, in which case they keep
/// their default values. Errors name the offending section and field.
ConfigRegistry parse_registry(const std::string& text, bool allow_partial = false);
ConfigRegistry load_registry(const std::filesystem::path& path, bool allow_partial = false);

}  // namespace cmawiz
