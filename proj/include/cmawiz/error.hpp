#pragma once

#include <stdexcept>
#include <string>

namespace cmawiz {

enum class ErrorKind {
  InvalidConfig,
  InvalidDomain,
  InvalidLoss,
  BudgetTooSmall,
  DimensionMismatch,
  UnknownName,
  Parse,
  MissingRecords,
  Io,
};

/// Every failure surfaced by the library. `kind()` lets callers (and tests)
/// branch on the category without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cmawiz
