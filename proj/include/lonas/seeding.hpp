#pragma once

#include <cstdint>
#include <random>

namespace lonas {

// SplitMix64 output finisher. finish(0) == 0.
constexpr std::uint64_t splitmix_finish(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Mixing term for the j-th derived stream; mix(0) == 0, so stream 0 keeps
/// the base seed unchanged.
constexpr std::uint64_t seed_mix(std::uint64_t j) noexcept {
  return splitmix_finish(j * 0x9E3779B97F4A7C15ULL);
}

constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t j) noexcept {
  return base_seed ^ seed_mix(j);
}

using Rng = std::mt19937_64;

// The standard distributions are implementation-defined, so draws are done by
// hand to keep results identical across standard libraries.

/// Uniform integer in [0, n) by rejection sampling. n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

}  // namespace lonas
