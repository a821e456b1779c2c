// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace boltz {

using Vec = std::vector<double>;
using VecView = std::span<const double>;

inline double dot(VecView a, VecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(VecView a) { return dot(a, a); }

inline double norm(VecView a) { return std::sqrt(norm2(a)); }

/// ⟨v⟩² = 1 + |v|²
inline double bracket2(VecView v) { return 1.0 + norm2(v); }

/// ⟨v⟩^s = (1 + |v|²)^{s/2}
inline double bracket_pow(VecView v, double s) {
  if (s == 0.0) return 1.0;
  if (s == 2.0) return bracket2(v);
  return std::pow(bracket2(v), 0.5 * s);
}

inline double dist2(VecView a, VecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(VecView a, VecView b) { return std::sqrt(dist2(a, b)); }

inline Vec operator+(VecView a, VecView b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(VecView a, VecView b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double c, VecView a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

/// Deterministic pairwise (tree) summation; fixed reduction order for
/// run-to-run bit stability independent of chunking.
double pairwise_sum(std::span<const double> values);

/// Fills `basis` (two vectors for N=3, one for N=2) with an orthonormal
/// basis of the hyperplane orthogonal to the unit vector `n`. Deterministic.
void orthonormal_complement(VecView n, std::vector<Vec>& basis);

}  // namespace boltz
