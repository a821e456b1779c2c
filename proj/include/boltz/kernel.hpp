// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace boltz {

/// Angular profile b evaluated as a function of the deviation angle
/// theta in (0, pi); b(cos theta) >= 0 wherever evaluated.
class AngularProfile {
 public:
  enum class Kind { Constant, InversePower, Table, Custom };

  static AngularProfile constant(double value);
  /// Inverse-power-law profile for potential exponent s > 5 (dimension 3
  /// physics): b(cos theta) = cprime * theta^{-1-2/(s-1)} / sin(theta) on
  /// (0, pi/2], extended by reflection theta -> pi - theta.
  static AngularProfile inverse_power(double s, double cprime);
  /// Piecewise-linear table over theta in (0, pi).
  static AngularProfile table(std::vector<double> theta, std::vector<double> value,
                              std::optional<double> singularity_exponent = {});
  static AngularProfile custom(std::function<double(double)> fn,
                               std::optional<double> singularity_exponent = {});

  double operator()(double theta) const;
  Kind kind() const { return kind_; }
  /// nu >= 0 with b(cos theta) * theta^nu bounded near the endpoints, when
  /// known (reflected profiles share the exponent at both endpoints).
  std::optional<double> singularity_exponent() const { return singularity_exponent_; }

  double constant_value() const { return constant_value_; }
  double ipl_s() const { return ipl_s_; }
  double ipl_cprime() const { return ipl_cprime_; }
  const std::vector<double>& table_theta() const { return table_theta_; }
  const std::vector<double>& table_value() const { return table_value_; }

 private:
  Kind kind_ = Kind::Constant;
  double constant_value_ = 0.0;
  double ipl_s_ = 0.0, ipl_cprime_ = 1.0;
  std::vector<double> table_theta_, table_value_;
  std::function<double(double)> custom_;
  std::optional<double> singularity_exponent_;
};

struct KernelConstants {
  double A0 = 0.0;  // |S^{N-2}| ∫ b sin^{N-2}; +inf when not integrable
  double A2 = 0.0;  // |S^{N-2}| ∫ b sin^{N}
  struct ApStar {
    double p1 = 0.0;
    double value = 0.0;
  };
  std::optional<ApStar> ap_star;
  double quadrature_error_estimate = 0.0;
};

enum class Assumption { H0, H1, H2, H3, H4 };
std::string to_string(Assumption a);

struct AssumptionReport {
  // Integrability of the b-component of each assumption, ignoring the
  // gamma-range preconditions.
  bool h0_b = false, h1_b = false, h2_b = false, h3_b = false, h4_b = false;
  std::set<Assumption> labels;  // with gamma preconditions applied
};

/// Collision kernel B(z, sigma) = |z|^gamma b(cos theta), optionally
/// truncated to B_n = min{|z|^gamma, n} min{b, n}. Immutable; derived
/// constants are memoized behind a thread-safe cache.
class KernelSpec {
 public:
  KernelSpec(int dimension, double gamma, AngularProfile angular,
             std::optional<double> truncation_level = {});

  int dimension() const { return dim_; }
  double gamma() const { return gamma_; }
  const AngularProfile& angular() const { return angular_; }
  std::optional<double> truncation_level() const { return truncation_; }

  /// Effective angular factor (min{b, n} when truncated).
  double b(double theta) const;
  /// Effective kinetic factor (min{r^gamma, n} when truncated).
  double kinetic(double r) const;
  /// B(z, sigma) for |z| = r and deviation angle theta.
  double evaluate(double r, double theta) const { return kinetic(r) * b(theta); }

  const KernelConstants& constants_cached() const;

 private:
  friend KernelConstants constants(const KernelSpec&, std::optional<double>);
  int dim_;
  double gamma_;
  AngularProfile angular_;
  std::optional<double> truncation_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// A0, A2 and (optionally, for gamma = 2) the Holder constant A*_{p1}.
KernelConstants constants(const KernelSpec& spec, std::optional<double> p1 = {});

AssumptionReport classify_report(const KernelSpec& spec, double tol = 1e-10);
std::set<Assumption> classify_assumptions(const KernelSpec& spec, double tol = 1e-10);

/// Angular cutoff remainder
/// eps_p = (2/A2)|S^{N-2}| ∫ {∫_0^1 t (1 - t sin²θ/2)^{p-2} dt} b sin^N θ dθ,
/// in (0, 1], nonincreasing to 0 as p -> ∞. The inner t-integral is closed
/// form. Requires H0 and p >= 3.
double epsilon_p(const KernelSpec& spec, double p);

KernelSpec truncate(const KernelSpec& spec, double n);

/// Physical inverse-power-law preset (dimension 3): gamma = (s-5)/(s-1),
/// b(cos θ) sin θ ~ cprime θ^{-1-2/(s-1)} near 0. Hard potentials need s > 5.
KernelSpec inverse_power_law(double s, int dimension = 3, double cprime = 1.0);

/// Hard spheres in dimension 3: gamma = 1, b = 1/(4π) (A0 = 1, A2 = 2/3).
KernelSpec hard_sphere();

std::string to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const std::string& text);

}  // namespace boltz
