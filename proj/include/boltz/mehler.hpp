// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

#include "boltz/measure.hpp"
#include "boltz/rng.hpp"
#include "boltz/vec.hpp"

namespace boltz {

/// Summary statistics of the source measure driving the Mehler transform:
/// rho = ‖F₀‖₀, v0 = mean velocity, T = (1/(N rho)) ∫ |v - v0|² dF₀.
struct MehlerParams {
  double rho = 0.0;
  Vec v0;
  double temperature = 0.0;
  double n = 0.0;       // regularization index the derived quantities used
  bool degenerate = false;  // T = 0 (Dirac source, possibly split atoms)
};

MehlerParams mehler_params(const DiscreteMeasure& f0);

/// Regularized density
///   f₀ⁿ(v) = e^{Nn} Σ_j w_j M(e^n (v - v0 - sqrt(1 - e^{-2n}) (v_j - v0)))
/// with M the Maxwellian of temperature T. Strictly positive; integrates to
/// rho and matches mass, momentum and energy of the source exactly.
double mehler_density(const DiscreteMeasure& f0, double n, VecView v);

/// Exact mixture sampling of the density: pick atom j with probability
/// w_j / rho, then v = v0 + sqrt(1-e^{-2n})(v_j - v0) + e^{-n} sqrt(T) xi.
/// Returns `count` equal-weight atoms (weight rho/count); deterministic for a
/// given seed.
DiscreteMeasure mehler_sample(const DiscreteMeasure& f0, double n, std::size_t count,
                              std::uint64_t seed);

/// Analytic (closed-form Gaussian) mass / momentum / energy of the density.
ConservedTriple mehler_moments(const DiscreteMeasure& f0, double n);

/// ∫ phi(v) f₀ⁿ(v) dv by per-component tensor Gauss-Hermite quadrature.
double mehler_integrate(const DiscreteMeasure& f0, double n,
                        const std::function<double(VecView)>& phi, int gh_order = 48);

/// max over dictionary entries with weight_order <= 2 of
/// |∫ phi f₀ⁿ dv - ∫ phi dF₀| (the weak-convergence defect).
double mehler_weak_defect(const DiscreteMeasure& f0, double n, const TestDictionary& dict,
                          int gh_order = 48);

struct MehlerTruncation {
  double K = 0.0;               // chosen level, K > n on the doubling grid
  double achieved_defect = 0.0; // weighted L1 defect at K
  double threshold = 0.0;       // rho / (2n)
};

/// Smallest K > n on a doubling grid (from 2n) such that
///   ∫ (f₀ⁿ - min{f₀ⁿ, K} e^{-|v|²/K}) ⟨v⟩² dv <= rho/(2n).
/// The defect splits into closed-form Gaussian integrals plus a small
/// clipped-peak correction integrated numerically.
MehlerTruncation mehler_truncate(const DiscreteMeasure& f0, double n,
                                 double search_cap = 1048576.0);

/// The truncation defect at a given level K (exposed for monotonicity tests).
double mehler_truncation_defect(const DiscreteMeasure& f0, double n, double K);

}  // namespace boltz
