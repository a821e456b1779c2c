// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace boltz {

/// SplitMix64 mixing step; used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Hash-combine for (seed, stream ids) -> substream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Seeded random stream with a fully specified, platform-independent
/// generator (mt19937_64) and hand-rolled variate transforms, so that equal
/// seeds give bit-identical sequences everywhere. Substreams are derived by
/// hashing (seed, id) — documented stream splitting used by the samplers and
/// the per-pair collision streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via Box–Muller (cached second value).
  double normal();

  /// Poisson draw, exact inversion by products; large means are split into
  /// chunks so the product never underflows.
  std::uint64_t poisson(double mean);

  /// Derived independent substream.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0) const {
    return RngStream(derive_seed(seed_, a, b));
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
  bool have_cached_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace boltz
