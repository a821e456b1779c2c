// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <utility>

#include "boltz/kernel.hpp"
#include "boltz/measure.hpp"
#include "boltz/sphere_quadrature.hpp"
#include "boltz/test_functions.hpp"
#include "boltz/vec.hpp"

namespace boltz {

/// Elastic collision map:
///   v'  = (v + v*)/2 + (|v - v*|/2) sigma,
///   v*' = (v + v*)/2 - (|v - v*|/2) sigma.
/// sigma must be a unit vector within 1e-12.
std::pair<Vec, Vec> post_collision(VecView v, VecView v_star, VecView sigma);

/// In-place hot-path variant (no allocation, no unit check).
void post_collision_inplace(std::span<double> v, std::span<double> v_star, VecView sigma);

/// The two algebraic representations of (⟨v'⟩², ⟨v*'⟩²) plus the direct
/// evaluation through the collision map, for cross-validation:
///  - via_h uses sigma against h = (v+v*)/|v+v*|;
///  - via_j expands sigma = cos(theta) n + sin(theta) omega and uses the unit
///    vector j spanning h against n.
struct EnergyRepresentations {
  std::array<double, 2> via_h;
  std::array<double, 2> via_j;
  std::array<double, 2> direct;
};
EnergyRepresentations energy_representations(VecView v, VecView v_star, double theta,
                                             VecView omega);

/// Dual kernel acting on the symmetric difference,
///   L_B[Δφ](v, v*) = ∫_0^π  B̄(|v-v*|, cosθ) sin^{N-2}θ (∫_{S^{N-2}(n)} Δφ dω) dθ,
/// with the ω-integral evaluated before the (possibly singular) angular
/// factor multiplies it. Convention n = e₁ for v = v* (immaterial: the
/// kinetic factor vanishes).
double l_b_delta(const SmoothTestFunction& phi, VecView v, VecView v_star,
                 const KernelSpec& spec, const SphereQuadrature& quad);

struct CheckedValue {
  double value = 0.0;
  double refinement_error = 0.0;
  bool converged = true;
};
/// Same, with a halved/doubled-node convergence estimate.
CheckedValue l_b_delta_checked(const SmoothTestFunction& phi, VecView v, VecView v_star,
                               const KernelSpec& spec, const SphereQuadrature& quad,
                               double tol = 1e-8);

/// ⟨Q(μ, ν), φ⟩ = ½ Σ_ij w_i w̃_j L_B[Δφ](v_i, v_j); deterministic pairwise
/// reduction over the (i, j) grid.
double q_weak(const DiscreteMeasure& mu, const SmoothTestFunction& phi,
              const KernelSpec& spec, const SphereQuadrature& quad);
double q_weak(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
              const SmoothTestFunction& phi, const KernelSpec& spec,
              const SphereQuadrature& quad);

/// Gain term as an atomic pushforward: one atom per (pair, node) at
/// v'(v_i, v_j, sigma_k) with weight w_i w̃_j B(v_i - v_j, sigma_k) q_k.
/// Requires A0 finite (possibly after truncation). No merging by default.
DiscreteMeasure q_gain(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const KernelSpec& spec, const SphereQuadrature& quad);

/// Loss term: atoms at v_i with weights w_i Σ_j w̃_j A(v_i - v_j), where
/// A(z) = A0 min{|z|^γ, n}. Exact (no sphere quadrature).
DiscreteMeasure q_loss(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const KernelSpec& spec);

}  // namespace boltz
