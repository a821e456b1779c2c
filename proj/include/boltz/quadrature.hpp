// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace boltz {

using Integrand = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  bool diverged = false;  // endpoint scan exceeded the divergence threshold
};

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Gauss-Hermite rule for expectations against the standard normal density:
/// E[f(Z)] ~ sum w_i f(x_i), sum w_i = 1.
const GaussRule& gauss_hermite_probabilists(int n);

/// Adaptive Gauss-Kronrod 15(7) with recursive bisection.
QuadratureResult integrate_adaptive(const Integrand& f, double a, double b,
                                   double abs_tol = 1e-10, double rel_tol = 1e-12,
                                   int max_depth = 40);

/// Integral over [a, b] with possible power-type endpoint singularities at one
/// or both endpoints: geometric panels toward the flagged endpoints (ratio 2)
/// down to where panel contributions are negligible, adaptive GK inside. The
/// divergence threshold (partial sums beyond 1e12 under refinement) flags
/// non-integrable endpoints.
QuadratureResult integrate_endpoint_singular(const Integrand& f, double a, double b,
                                            bool singular_at_a, bool singular_at_b,
                                            double abs_tol = 1e-10);

}  // namespace boltz
