#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace cmawiz {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a sub-stream identified by an ordered tuple of indices.
template <typename... Ts>
constexpr std::uint64_t derive_seed(std::uint64_t base, Ts... parts) noexcept {
  std::uint64_t s = mix64(base);
  ((s = mix64(s ^ static_cast<std::uint64_t>(parts))), ...);
  return s;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Shortest decimal string that round-trips to the same double.
std::string format_real(double v);

/// Inverse of format_real; accepts "inf", "-inf" and "nan".
double parse_real(std::string_view s);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to pre-allocated slots so the outcome is scheduling-independent.
/// The first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace cmawiz
