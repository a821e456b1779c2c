// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "boltz/kernel.hpp"
#include "boltz/measure.hpp"
#include "boltz/rng.hpp"
#include "boltz/special_functions.hpp"
#include "boltz/vec.hpp"

namespace boltz::testing {

inline DiscreteMeasure random_measure(int dim, std::size_t atoms, RngStream& rng,
                                      double radius = 3.0) {
  DiscreteMeasure m(dim);
  Vec v(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < atoms; ++i) {
    for (double& c : v) c = rng.uniform(-radius, radius);
    m.add_atom(v, rng.uniform(0.05, 1.0));
  }
  return m;
}

inline Vec random_vec(int dim, RngStream& rng, double radius = 3.0) {
  Vec v(static_cast<std::size_t>(dim));
  for (double& c : v) c = rng.uniform(-radius, radius);
  return v;
}

inline Vec random_unit(int dim, RngStream& rng) {
  Vec v(static_cast<std::size_t>(dim));
  double n = 0.0;
  do {
    for (double& c : v) c = rng.normal();
    n = norm(v);
  } while (n < 1e-6);
  for (double& c : v) c /= n;
  return v;
}

/// The two-atom benchmark measure: ½ δ_{e1} + ½ δ_{-e1} (mass 1, energy 1,
/// ‖F₀‖₂ = 2).
inline DiscreteMeasure two_atom_benchmark(int dim = 3) {
  DiscreteMeasure m(dim);
  Vec e1(static_cast<std::size_t>(dim), 0.0), me1(static_cast<std::size_t>(dim), 0.0);
  e1[0] = 1.0;
  me1[0] = -1.0;
  m.add_atom(e1, 0.5);
  m.add_atom(me1, 0.5);
  return m;
}

/// Right-hand side of the Povzner bound on L_B[Δ⟨·⟩^{2p}] for hard-potential
/// kernels under H0 (assembled from A2, eps_p and the binomial sums).
inline double povzner_rhs(double p, VecView v, VecView vs, double A2, double eps_p,
                          double gamma) {
  const double bv = bracket2(v), bvs = bracket2(vs);
  auto bp = [&](double base, double expo) { return std::pow(base, 0.5 * expo); };
  const int k_p = static_cast<int>(std::floor((p + 1.0) / 2.0));
  double rhs = -0.25 * A2 * (bp(bv, 2.0 * p + gamma) + bp(bvs, 2.0 * p + gamma));
  rhs += 0.5 * A2 * (bp(bv, 2.0 * p) * bp(bvs, gamma) + bp(bvs, 2.0 * p) * bp(bv, gamma));
  for (int k = 1; k <= k_p; ++k) {
    const double c = binomial(p, k);
    rhs += A2 * c *
           (bp(bv, 2.0 * k + gamma) * bp(bvs, 2.0 * (p - k)) +
            bp(bv, 2.0 * (p - k) + gamma) * bp(bvs, 2.0 * k));
    rhs += A2 * c *
           (bp(bv, 2.0 * k) * bp(bvs, 2.0 * (p - k) + gamma) +
            bp(bv, 2.0 * (p - k)) * bp(bvs, 2.0 * k + gamma));
  }
  const double cc = 2.0 * p * (p - 1.0) * A2 * eps_p;
  for (int k = 0; k <= k_p - 1; ++k) {
    const double c = binomial(p - 2.0, k);
    rhs += cc * c *
           (bp(bv, 2.0 * (k + 1.0) + gamma) * bp(bvs, 2.0 * (p - 1.0 - k)) +
            bp(bv, 2.0 * (p - 1.0 - k) + gamma) * bp(bvs, 2.0 * (k + 1.0)));
    rhs += cc * c *
           (bp(bv, 2.0 * (k + 1.0)) * bp(bvs, 2.0 * (p - 1.0 - k) + gamma) +
            bp(bv, 2.0 * (p - 1.0 - k)) * bp(bvs, 2.0 * (k + 1.0) + gamma));
  }
  return rhs;
}

/// Right-hand side of the gamma = 2 Povzner variant (Holder route), valid for
/// p >= (12 A*_{p1} / A0)^{2 q1}.
inline double povzner_rhs_h3(double p, VecView v, VecView vs, double A0, double ap_star,
                             double p1) {
  const double q1 = p1 / (p1 - 1.0);
  const double eta = 0.5 / q1;
  const double bv = bracket2(v), bvs = bracket2(vs);
  auto bp = [&](double base, double expo) { return std::pow(base, expo); };
  const int k_p = static_cast<int>(std::floor((p + 1.0) / 2.0));
  const double lead = 12.0 * ap_star / std::pow(p, eta);
  double rhs = 0.0;
  for (int k = 1; k <= k_p; ++k) {
    const double c = binomial(p, k);
    rhs += lead * c * (bp(bv, k + 1.0) * bp(bvs, p - k) + bp(bv, p - k + 1.0) * bp(bvs, k));
    rhs += lead * c * (bp(bv, k) * bp(bvs, p - k + 1.0) + bp(bv, p - k) * bp(bvs, k + 1.0));
  }
  rhs += 0.5 * A0 * (bp(bv, p) * bvs + bp(bvs, p) * bv);
  rhs -= 0.25 * A0 * (bp(bv, p + 1.0) + bp(bvs, p + 1.0));
  return rhs;
}

}  // namespace boltz::testing
