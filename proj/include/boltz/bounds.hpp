// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace boltz {

enum class EnvelopeKind {
  moment_production,
  exponential,
  exponential_general,
  stability_tau,
  ode_comparison,
};
std::string to_string(EnvelopeKind k);

/// Precomputed constants plus an evaluable time profile.
struct BoundEnvelope {
  EnvelopeKind kind = EnvelopeKind::moment_production;
  std::map<std::string, double> constants;
  std::function<double(double)> evaluate;
};

/// K_s = e2 (2^{s+7} (e2/mass) (1 + 1/(16 e2 A2 gamma)))^{(s-2)/gamma};
/// evaluate(t) = K_s (1 + 1/t)^{(s-2)/gamma}. Requires s >= 2; the s = 2
/// envelope is the constant e2.
BoundEnvelope moment_production_envelope(double mass, double e2, double A2, double gamma,
                                         double s);

/// beta = 16 e2 A2 gamma; evaluate(t) = alpha(t) = 2^{-s0}(mass/e2)(1-e^{-beta t});
/// the bound claim is ∫ e^{alpha(t) ⟨v⟩^gamma} dF_t <= 2 mass, stored in
/// constants["bound"].
BoundEnvelope exponential_envelope(double mass, double e2, double A2, double gamma,
                                   double s0);

/// (e^{alpha_s(t)} + 2) mass with alpha_s(t) = c (c/alpha(t))^{s/(gamma-s)};
/// requires 0 < s < gamma.
double exponential_general(const BoundEnvelope& exponential, double s, double c, double t);

/// c_tau = 4 A0 (K_{2+gamma} + e2)(1 + 1/tau), tau > 0.
double stability_tau_constant(double A0, double K_2_plus_gamma, double e2, double tau);

/// Psi_{F0}(d0) e^{C (1+t)}; the caller supplies Psi (from psi_localization)
/// and the constant C, which the source result leaves implicit.
double stability_zero_envelope(const std::function<double(double)>& psi, double C,
                               double d0, double t);

/// Y(t) = (A/(B(1-e^{-eps A t})))^{1/eps}: the blow-up/decay comparison
/// profile with Y' = A Y - B Y^{1+eps}, Y(0+) = inf, Y(inf) = (A/B)^{1/eps}.
double ode_comparison_Y(double A, double B, double eps, double t);
BoundEnvelope ode_comparison_envelope(double A, double B, double eps);

/// true iff u(t_i) <= Y(t_i)(1 + 1e-9) at all samples; sample times must be
/// positive.
bool verify_ode_comparison(const std::vector<double>& times, const std::vector<double>& u,
                           double A, double B, double eps);

/// Truncated fractional binomial sums with k_p = floor((p+1)/2):
///   lower = sum_{k=0}^{k_p-1} C(p,k)(x^k y^{p-k} + x^{p-k} y^k) <= (x+y)^p
///   upper = sum_{k=0}^{k_p}  ...                               >= (x+y)^p
std::pair<double, double> binomial_sandwich(double p, double x, double y);

struct BetaSums {
  double sum = 0.0;    // a = 1: sum C(p,k) B(k, p-k); a > 1: the (ak, a(p-k)) sum
  double bound = 0.0;  // a = 1: 4 log p; a > 1: (ap)^{1-a} shape
  // a > 1 only: the shifted sum C(p-2,k) B(a(k+1), a(p-k-1)) and shape (ap)^{-a}.
  std::optional<std::pair<double, double>> shifted;
};
/// Requires p >= 3 and a >= 1. For a = 1 the first sum telescopes to
/// sum p/(k(p-k)).
BetaSums beta_sum_estimates(double p, double a);

struct PhaseCheckRow {
  double lambda = 0.0;
  double integral = 0.0;
  double asymptote = 0.0;
  double ratio = 0.0;
};
/// Laplace/stationary-phase comparison: ∫_0^R x^{alpha-1} g(x) e^{lambda S(x)} dx
/// against Gamma(alpha) (-lambda S'(0))^{-alpha} g(0). S(0) = 0 and S' < 0 on
/// [0, R) are validated by sampling.
std::vector<PhaseCheckRow> stationary_phase_check(double alpha,
                                                  const std::function<double(double)>& g,
                                                  const std::function<double(double)>& S,
                                                  double R,
                                                  const std::vector<double>& lambdas);

/// Theta surrogate from the configured s0: Theta = 2^{s0-1} e2/mass, so that
/// alpha(t) = (1 - e^{-beta t})/(2 Theta).
double theta_surrogate(double mass, double e2, double s0);

/// Y_q(t) = (Theta/(1-e^{-beta t}))^q.
double y_q_envelope(double theta, double beta, double q, double t);

/// Z_q(t) = m_{gamma q}(t) / (Gamma(q) mass) for a measured moment value.
double z_q_normalized(double moment_gamma_q, double q, double mass);

}  // namespace boltz
