// SPDX-License-Identifier: Apache-2.0
#include "boltz/rng.hpp"

#include <cmath>

namespace boltz {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9E3779B97F4A7C15ULL;
  h ^= splitmix64(s);
  s ^= b + 0xD1B54A32D192ED03ULL;
  h ^= splitmix64(s);
  return h;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = gen_();
  } while (r >= limit);
  return r % n;
}

double RngStream::normal() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 in (0,1] to keep the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::uint64_t total = 0;
  // Chunks keep exp(-chunk) well above the double underflow threshold.
  while (mean > 0.0) {
    const double chunk = mean > 32.0 ? 32.0 : mean;
    mean -= chunk;
    const double threshold = std::exp(-chunk);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > threshold) {
      ++k;
      prod *= uniform();
    }
    total += k;
  }
  return total;
}

}  // namespace boltz
