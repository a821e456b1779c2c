// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "boltz/vec.hpp"

namespace boltz {

/// Deterministic product quadrature on S^{N-1} in the decomposition
/// sigma = cos(theta) n + sin(theta) omega, omega in S^{N-2}(n), N in {2, 3}.
///
/// Theta weights absorb the sin^{N-2} surface factor and the Gauss panel
/// weights, so for any g:
///   ∫_{S^{N-1}} g dsigma ~ sum_i theta_weight_i sum_j az_weight g(sigma_ij).
/// Azimuth nodes are stored as angles; omega = cos(phi) e_a + sin(phi) e_b
/// for any orthonormal (e_a, e_b) of the plane orthogonal to n (N = 3), and
/// omega = ±n_perp for N = 2 (two nodes of weight 1, matching the convention
/// |S^0| = 2).
class SphereQuadrature {
 public:
  struct ThetaNode {
    double theta;
    double weight;  // includes sin^{N-2}(theta)
  };

  /// Composite Gauss panels, uniform over (0, pi). Good for bounded angular
  /// profiles.
  static SphereQuadrature uniform(int dimension, int theta_nodes, int azimuth_nodes);

  /// Panels geometrically refined toward theta = 0 and theta = pi for
  /// endpoint-singular profiles; still covers all of (0, pi).
  static SphereQuadrature graded(int dimension, int theta_nodes, int azimuth_nodes);

  int dimension() const { return dim_; }
  const std::vector<ThetaNode>& theta_nodes() const { return theta_; }
  const std::vector<double>& azimuth_angles() const { return azimuth_; }
  double azimuth_weight() const { return azimuth_weight_; }
  bool is_graded() const { return graded_; }

  /// Doubled node counts in both directions (for convergence checks).
  SphereQuadrature refined() const;

  /// Sum of all product weights; approximates |S^{N-1}|.
  double total_weight() const;

  std::string to_json() const;

 private:
  int dim_ = 3;
  bool graded_ = false;
  int theta_count_ = 0, azimuth_count_ = 0;
  std::vector<ThetaNode> theta_;
  std::vector<double> azimuth_;
  double azimuth_weight_ = 0.0;
};

}  // namespace boltz
