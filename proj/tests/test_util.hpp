#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cubfuzz/rating.hpp"

namespace testutil {

/// Deterministic generator with the same canonical-double construction the
/// library uses, so test fixtures do not depend on libstdc++ distribution
/// internals.
struct Rng {
  std::mt19937_64 g;

  explicit Rng(std::uint64_t seed) : g(seed) {}

  double real() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
  double real(double lo, double hi) { return lo + (hi - lo) * real(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(real() * (hi - lo + 1)); }
};

/// Random frequency table with at least one observation per category block.
inline cubfuzz::RatingSample random_sample(Rng& rng, int m, int max_per_cat = 30) {
  std::vector<long> freq(static_cast<size_t>(m));
  long n = 0;
  while (n == 0) {
    n = 0;
    for (int r = 0; r < m; ++r) {
      freq[static_cast<size_t>(r)] = rng.integer(0, max_per_cat);
      n += freq[static_cast<size_t>(r)];
    }
  }
  return cubfuzz::sample_from_freq(freq, m);
}

}  // namespace testutil
