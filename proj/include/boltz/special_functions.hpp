// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace boltz {

/// Gamma function on x > 0 (Lanczos, ~1e-15 relative).
double gamma_fn(double x);

/// log Gamma on x > 0; safe for large arguments.
double log_gamma(double x);

/// Euler beta B(x, y), x, y > 0.
double beta_fn(double x, double y);

/// Generalized binomial coefficient C(p, k) = p(p-1)...(p-k+1)/k! for real
/// p >= 0 and integer k >= 0.
double binomial(double p, int k);

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x)/Γ(a), a > 0, x >= 0.
double gamma_q(double a, double x);

/// Chi-square upper tail probability with `dof` degrees of freedom.
double chi_square_tail(double dof, double chi2);

/// Surface measure |S^d| of the unit d-sphere embedded in R^{d+1};
/// |S^0| = 2, |S^1| = 2*pi, |S^2| = 4*pi.
double sphere_area(int d);

}  // namespace boltz
