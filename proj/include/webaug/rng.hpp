#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace webaug {

// All randomized operations draw through these helpers instead of
// std::*_distribution, whose output is implementation-defined. Same seed,
// same sequence, on any standard library.

inline uint64_t rng_u64(std::mt19937_64 &rng) { return rng(); }

// Unbiased integer in [0, bound) via rejection sampling. bound > 0.
inline uint64_t rng_below(std::mt19937_64 &rng, uint64_t bound) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double rng_real(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void rng_shuffle(std::mt19937_64 &rng, std::vector<T> &v) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Derives an independent stream from a parent seed and a stream tag, so
// per-category or per-item draws do not depend on processing order.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
  uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL + tag * 0xbf58476d1ce4e5b9ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace webaug
