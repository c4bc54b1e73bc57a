#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmawiz/run_record.hpp"

namespace cmawiz {

/// Stand-in competitors for comparisons: "random-search", "one-plus-one-es",
/// "differential-evolution".
const std::vector<std::string>& baseline_names();
bool is_baseline(const std::string& name);

/// Same record contract as run(); history gets an entry at every improvement
/// plus one at the final evaluation. Throws UnknownName.
RunRecord run_baseline(const std::string& name, const InstanceSpec& instance, std::uint64_t seed);

}  // namespace cmawiz
