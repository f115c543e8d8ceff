#pragma once

#include <cstdint>
#include <random>

namespace vls {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for (seed, stream, item): results do not depend on
/// the order in which items are processed.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t item) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ item));
}

/// Uniform double in [lo, hi) from the top 53 bits; fixed across standard
/// library implementations, unlike std::uniform_real_distribution.
inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace vls
