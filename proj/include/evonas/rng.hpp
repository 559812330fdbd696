#pragma once

#include <cstdint>

namespace evonas {

/// splitmix64 finalizer; bijective, good avalanche.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (splitmix64(b) + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

/// Uniform in [0, 1), derived from the full 53-bit mantissa.
inline double u01_from_hash(std::uint64_t h) {
  return static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
}

/// Uniform in [-1, 1).
inline double symmetric_from_hash(std::uint64_t h) { return 2.0 * u01_from_hash(h) - 1.0; }

/// Standard normal via Box-Muller on two hash-derived uniforms; fully
/// deterministic across platforms, unlike std::normal_distribution.
double gaussian_from_hash(std::uint64_t h);

}  // namespace evonas
