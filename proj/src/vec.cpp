// SPDX-License-Identifier: Apache-2.0
#include "boltz/vec.hpp"

#include <algorithm>
#include <cstdlib>

#include "boltz/error.hpp"

namespace boltz {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

void orthonormal_complement(VecView n, std::vector<Vec>& basis) {
  const std::size_t dim = n.size();
  if (dim < 2) throw Error("orthonormal_complement: dimension must be >= 2");
  basis.assign(dim - 1, Vec(dim, 0.0));
  if (dim == 2) {
    // n-perp, fixed orientation.
    basis[0][0] = -n[1];
    basis[0][1] = n[0];
    return;
  }
  // Gram-Schmidt against the axis least aligned with n; deterministic.
  std::size_t k = 0;
  for (std::size_t i = 1; i < dim; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  Vec e(dim, 0.0);
  e[k] = 1.0;
  Vec& a = basis[0];
  const double p = dot(e, n);
  for (std::size_t i = 0; i < dim; ++i) a[i] = e[i] - p * n[i];
  const double na = norm(a);
  for (std::size_t i = 0; i < dim; ++i) a[i] /= na;
  if (dim == 3) {
    // b = n x a
    Vec& b = basis[1];
    b[0] = n[1] * a[2] - n[2] * a[1];
    b[1] = n[2] * a[0] - n[0] * a[2];
    b[2] = n[0] * a[1] - n[1] * a[0];
    return;
  }
  for (std::size_t j = 1; j + 1 < dim; ++j) {
    // General dimensions: project successive axes.
    Vec& b = basis[j];
    std::size_t axis = (k + j) % dim;
    b.assign(dim, 0.0);
    b[axis] = 1.0;
    double pn = dot(b, n);
    for (std::size_t i = 0; i < dim; ++i) b[i] -= pn * n[i];
    for (std::size_t l = 0; l < j; ++l) {
      const double pb = dot(b, basis[l]);
      for (std::size_t i = 0; i < dim; ++i) b[i] -= pb * basis[l][i];
    }
    const double nb = norm(b);
    if (nb < 1e-12) throw Error("orthonormal_complement: degenerate basis");
    for (std::size_t i = 0; i < dim; ++i) b[i] /= nb;
  }
}

}  // namespace boltz
