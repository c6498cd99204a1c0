#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bcstreams::detail {

// std::mt19937_64 output is fully specified by the standard, so everything built on
// top of the raw engine (rather than std:: distributions, whose output is
// implementation-defined) is reproducible across platforms and library versions.
using Rng = std::mt19937_64;

inline std::uint64_t next_u64(Rng& rng) { return rng(); }

/// Uniform index in [0, n). n must be > 0. Modulo bias is irrelevant at our scales.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

/// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fisher–Yates shuffle driven by the raw engine.
template <class T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace bcstreams::detail
