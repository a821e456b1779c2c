// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boltz/vec.hpp"

namespace boltz {

/// Finite atomic measure with signed weights. Velocities are stored flat
/// (row-major, stride = dimension). Values are immutable once built except
/// through add_atom; all operations are pure.
class SignedMeasure {
 public:
  explicit SignedMeasure(int dimension);

  int dimension() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  VecView velocity(std::size_t i) const {
    return VecView(velocities_.data() + i * static_cast<std::size_t>(dim_),
                   static_cast<std::size_t>(dim_));
  }
  double weight(std::size_t i) const { return weights_[i]; }

  void add_atom(VecView v, double w);
  void reserve(std::size_t n);

  /// Coalesces atoms with bitwise-equal velocities (exact comparison keeps
  /// the decomposition canonical); drops zero weights.
  SignedMeasure merged() const;

  /// Merge variant that first snaps velocity components to multiples of eps.
  SignedMeasure merged_snapped(double eps) const;

  SignedMeasure& operator+=(const SignedMeasure& other);
  SignedMeasure scaled(double c) const;

 private:
  int dim_;
  std::vector<double> velocities_;
  std::vector<double> weights_;
};

/// Atomic measure with nonnegative weights: the computational stand-in for a
/// positive Borel measure with finite moments.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(int dimension);

  int dimension() const { return signed_.dimension(); }
  std::size_t size() const { return signed_.size(); }
  bool empty() const { return signed_.empty(); }

  VecView velocity(std::size_t i) const { return signed_.velocity(i); }
  double weight(std::size_t i) const { return signed_.weight(i); }

  void add_atom(VecView v, double w);  // w >= 0 required
  void reserve(std::size_t n) { signed_.reserve(n); }

  DiscreteMeasure merged() const;
  const SignedMeasure& as_signed() const { return signed_; }

  /// Single-atom support after merging (in particular, Dirac measures).
  bool is_dirac() const;

  static DiscreteMeasure from_signed_positive(const SignedMeasure& m);

 private:
  SignedMeasure signed_;
};

/// μ - ν as a signed measure on the union of the supports.
SignedMeasure difference(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// ‖μ‖_s = Σ |w_i| ⟨v_i⟩^s. Signed measures are coalesced first so the
/// result is the total variation norm of order s.
double moment_norm(const DiscreteMeasure& mu, double s);
double moment_norm(const SignedMeasure& mu, double s);

struct ConservedTriple {
  double mass = 0.0;
  Vec momentum;
  double energy = 0.0;
};
ConservedTriple conserved_triple(const DiscreteMeasure& mu);

/// Jordan decomposition: merged positive part and (negated) negative part
/// with disjoint supports.
std::pair<DiscreteMeasure, DiscreteMeasure> jordan_decompose(const SignedMeasure& mu);

/// Verifies |μ-ν| = ν - μ + 2(μ-ν)^+ atom-by-atom after merging.
bool tv_identity_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       double tol = 1e-12);

/// Ψ_μ(r) = r + r^{1/3} + Σ_{|v_i| > r^{-1/3}} w_i |v_i|²,  Ψ_μ(0) = 0.
double psi_localization(const DiscreteMeasure& mu, double r);

/// Σ w_i exp(a ⟨v_i⟩^γ); throws OverflowError when any exponent exceeds the
/// cap (default 700, below the double exp overflow threshold).
double exponential_moment(const DiscreteMeasure& mu, double a, double gamma,
                          double exponent_cap = 700.0);

/// One weighted test function: |phi(v)| <= sup_norm * ⟨v⟩^{weight_order}.
struct TestFunctionEntry {
  std::string name;
  std::function<double(VecView)> phi;
  double weight_order = 0.0;
  double sup_norm = 1.0;
};

struct TestDictionary {
  std::vector<TestFunctionEntry> entries;

  /// Default dictionary: 1, coordinates, |v|², a Gaussian, and cos(ξ·v) for
  /// 8 fixed frequencies (deterministically generated).
  static TestDictionary standard(int dimension);

  /// Checks the declared sup_norm bounds on a sampled grid; returns the worst
  /// observed ratio |phi(v)| ⟨v⟩^{-s} / sup_norm (should be <= 1).
  double validate(int dimension, double radius = 8.0, int samples_per_axis = 17) const;
};

double integrate(const DiscreteMeasure& mu, const std::function<double(VecView)>& phi);

/// max over entries of |∫φ dF - ∫φ dG| / sup_norm; a certified lower bound
/// for ‖F-G‖₂ whenever every weight_order <= 2.
double dictionary_distance(const DiscreteMeasure& f, const DiscreteMeasure& g,
                           const TestDictionary& dict);

// Serialization: {"dimension": N, "atoms": [[v1..vN, w], ...]}
std::string to_json(const SignedMeasure& mu);
std::string to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const std::string& text);
SignedMeasure signed_measure_from_json(const std::string& text);

// CSV: header "v1,...,vN,w", one atom per row.
void write_csv(std::ostream& os, const DiscreteMeasure& mu);
DiscreteMeasure measure_from_csv(std::istream& is);

}  // namespace boltz
