#pragma once

#include <cstdint>
#include <random>

namespace erpforge {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stable per-item seed: grid cells, bootstrap replicates and permutation
// draws each get an independent stream regardless of execution order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return seed ^ splitmix64(a ^ splitmix64(b));
}

}  // namespace erpforge
