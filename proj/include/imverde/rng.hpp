#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace imverde {

using Rng = std::mt19937_64;

/// Seed for the named sub-stream `stream` (and optional index) of a root seed.
/// Streams with different names or indices are statistically independent, so
/// work split across threads reproduces the sequential result.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t root, std::string_view stream, std::uint64_t index = 0) {
  return Rng(derive_seed(root, stream, index));
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace imverde
