#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cmawiz/run_record.hpp"

namespace cmawiz {

struct StoreKey {
  std::string algorithm;
  std::string suite;
  std::string instance_hash;
  std::uint64_t seed = 0;

  auto operator<=>(const StoreKey&) const = default;
};

StoreKey key_of(const RunRecord& record);

/// Append-only run log: a schema header line followed by one serialized
/// RunRecord per line. Opening a store whose last line was cut short (an
/// interrupted append) drops that fragment, so a resumed run rewrites it.
/// Single writer at a time.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path path);

  bool contains(const StoreKey& key) const { return index_.count(key) > 0; }
  /// No-op (returns false) when a record with the same key is already stored.
  bool append(const RunRecord& record);

  const std::vector<RunRecord>& records() const { return records_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<RunRecord> records_;
  std::set<StoreKey> index_;
};

}  // namespace cmawiz
