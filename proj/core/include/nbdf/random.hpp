#pragma once

#include <cstdint>
#include <random>

namespace nbdf {

using Rng = std::mt19937_64;

/// Independent stream for item `index` of a run seeded with `global_seed`.
inline Rng derive_stream(std::uint64_t global_seed, std::uint64_t index, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(global_seed), static_cast<std::uint32_t>(global_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace nbdf
