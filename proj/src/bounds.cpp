// SPDX-License-Identifier: Apache-2.0
#include "boltz/bounds.hpp"

#include <cmath>

#include "boltz/error.hpp"
#include "boltz/quadrature.hpp"
#include "boltz/special_functions.hpp"

namespace boltz {

std::string to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::moment_production: return "moment_production";
    case EnvelopeKind::exponential: return "exponential";
    case EnvelopeKind::exponential_general: return "exponential_general";
    case EnvelopeKind::stability_tau: return "stability_tau";
    case EnvelopeKind::ode_comparison: return "ode_comparison";
  }
  return "?";
}

BoundEnvelope moment_production_envelope(double mass, double e2, double A2, double gamma,
                                         double s) {
  if (!(mass > 0.0)) throw Error("moment_production_envelope: mass must be positive");
  if (s < 2.0) throw Error("moment_production_envelope: s must be >= 2");
  if (!(gamma > 0.0) || gamma > 2.0)
    throw Error("moment_production_envelope: gamma must be in (0, 2]");
  const double expo = (s - 2.0) / gamma;
  const double beta = 16.0 * e2 * A2 * gamma;
  const double k_s =
      e2 * std::pow(std::pow(2.0, s + 7.0) * (e2 / mass) * (1.0 + 1.0 / beta), expo);
  BoundEnvelope env;
  env.kind = EnvelopeKind::moment_production;
  env.constants = {{"K_s", k_s}, {"s", s}, {"gamma", gamma}, {"beta", beta},
                   {"mass", mass}, {"e2", e2}};
  env.evaluate = [k_s, expo](double t) { return k_s * std::pow(1.0 + 1.0 / t, expo); };
  return env;
}

BoundEnvelope exponential_envelope(double mass, double e2, double A2, double gamma,
                                   double s0) {
  if (!(mass > 0.0)) throw Error("exponential_envelope: mass must be positive");
  if (!(s0 > 1.0)) throw Error("exponential_envelope: s0 must be > 1");
  const double beta = 16.0 * e2 * A2 * gamma;
  const double amp = std::pow(2.0, -s0) * mass / e2;
  BoundEnvelope env;
  env.kind = EnvelopeKind::exponential;
  env.constants = {{"beta", beta},   {"s0", s0},     {"gamma", gamma},
                   {"mass", mass},   {"e2", e2},     {"bound", 2.0 * mass},
                   {"alpha_inf", amp}};
  env.evaluate = [amp, beta](double t) { return amp * -std::expm1(-beta * t); };
  return env;
}

double exponential_general(const BoundEnvelope& exponential, double s, double c, double t) {
  if (exponential.kind != EnvelopeKind::exponential)
    throw Error("exponential_general: needs an exponential envelope");
  const double gamma = exponential.constants.at("gamma");
  const double mass = exponential.constants.at("mass");
  if (!(s > 0.0) || !(s < gamma))
    throw Error("exponential_general: s must satisfy 0 < s < gamma");
  if (!(c > 0.0)) throw Error("exponential_general: c must be positive");
  const double alpha = exponential.evaluate(t);
  const double alpha_s = c * std::pow(c / alpha, s / (gamma - s));
  return (std::exp(alpha_s) + 2.0) * mass;
}

double stability_tau_constant(double A0, double K_2_plus_gamma, double e2, double tau) {
  if (!(tau > 0.0)) throw Error("stability_tau_constant: tau must be positive");
  return 4.0 * A0 * (K_2_plus_gamma + e2) * (1.0 + 1.0 / tau);
}

double stability_zero_envelope(const std::function<double(double)>& psi, double C,
                               double d0, double t) {
  if (!(C > 0.0)) throw Error("stability_zero_envelope: C must be positive");
  if (d0 < 0.0) throw Error("stability_zero_envelope: d0 must be >= 0");
  return psi(d0) * std::exp(C * (1.0 + t));
}

double ode_comparison_Y(double A, double B, double eps, double t) {
  if (!(A > 0.0) || !(B > 0.0) || !(eps > 0.0))
    throw Error("ode_comparison_Y: A, B, eps must be positive");
  if (!(t > 0.0)) throw Error("ode_comparison_Y: t must be positive");
  return std::pow(A / (B * -std::expm1(-eps * A * t)), 1.0 / eps);
}

BoundEnvelope ode_comparison_envelope(double A, double B, double eps) {
  BoundEnvelope env;
  env.kind = EnvelopeKind::ode_comparison;
  env.constants = {{"A", A}, {"B", B}, {"eps", eps},
                   {"limit", std::pow(A / B, 1.0 / eps)}};
  env.evaluate = [A, B, eps](double t) { return ode_comparison_Y(A, B, eps, t); };
  return env;
}

bool verify_ode_comparison(const std::vector<double>& times, const std::vector<double>& u,
                           double A, double B, double eps) {
  if (times.size() != u.size()) throw Error("verify_ode_comparison: size mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw Error("verify_ode_comparison: sample times must be > 0");
    const double y = ode_comparison_Y(A, B, eps, times[i]);
    if (u[i] > y * (1.0 + 1e-9)) return false;
  }
  return true;
}

std::pair<double, double> binomial_sandwich(double p, double x, double y) {
  if (!(p >= 1.0)) throw Error("binomial_sandwich: p must be >= 1");
  if (x < 0.0 || y < 0.0) throw Error("binomial_sandwich: x, y must be >= 0");
  const int k_p = static_cast<int>(std::floor((p + 1.0) / 2.0));
  double lower = 0.0, upper = 0.0;
  for (int k = 0; k <= k_p; ++k) {
    const double term = binomial(p, k) * (std::pow(x, k) * std::pow(y, p - k) +
                                          std::pow(x, p - k) * std::pow(y, k));
    if (k < k_p) lower += term;
    upper += term;
  }
  return {lower, upper};
}

BetaSums beta_sum_estimates(double p, double a) {
  if (!(p >= 3.0)) throw Error("beta_sum_estimates: p must be >= 3");
  if (a < 1.0) throw Error("beta_sum_estimates: a must be >= 1");
  const int k_p = static_cast<int>(std::floor((p + 1.0) / 2.0));
  BetaSums out;
  if (a == 1.0) {
    // C(p,k) B(k, p-k) = p/(k(p-k)).
    for (int k = 1; k <= k_p; ++k) out.sum += p / (k * (p - k));
    out.bound = 4.0 * std::log(p);
    return out;
  }
  for (int k = 1; k <= k_p; ++k)
    out.sum += binomial(p, k) * beta_fn(a * k, a * (p - k));
  out.bound = std::pow(a * p, 1.0 - a);
  double shifted = 0.0;
  for (int k = 0; k <= k_p - 1; ++k)
    shifted += binomial(p - 2.0, k) * beta_fn(a * (k + 1.0), a * (p - k - 1.0));
  out.shifted = {shifted, std::pow(a * p, -a)};
  return out;
}

std::vector<PhaseCheckRow> stationary_phase_check(double alpha,
                                                  const std::function<double(double)>& g,
                                                  const std::function<double(double)>& S,
                                                  double R,
                                                  const std::vector<double>& lambdas) {
  if (!(alpha > 0.0) || !(R > 0.0)) throw Error("stationary_phase_check: domain error");
  if (std::abs(S(0.0)) > 1e-14) throw Error("stationary_phase_check: S(0) must be 0");
  // S' < 0 on [0, R): validated by forward differences on a sample grid.
  const double h = R * 1e-7;
  double sp0 = (S(h) - S(0.0)) / h;
  {
    // Richardson-improved one-sided derivative at 0.
    const double d1 = (S(h) - S(0.0)) / h;
    const double d2 = (S(0.5 * h) - S(0.0)) / (0.5 * h);
    sp0 = 2.0 * d2 - d1;
  }
  if (!(sp0 < 0.0)) throw Error("stationary_phase_check: S'(0) must be negative");
  for (int i = 0; i < 64; ++i) {
    const double x = R * (i / 64.0);
    const double d = (S(std::min(x + h, R)) - S(x)) / (std::min(x + h, R) - x);
    if (!(d < 0.0)) throw Error("stationary_phase_check: S' must be negative on [0, R)");
  }
  std::vector<PhaseCheckRow> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    auto f = [&](double x) {
      return std::pow(x, alpha - 1.0) * g(x) * std::exp(lambda * S(x));
    };
    // Piecewise integration on a geometric ladder starting at the Laplace
    // scale 1/(lambda |S'(0)|), so the concentrated peak is never skipped.
    const double width = std::min(R, 1.0 / (lambda * -sp0));
    double value = 0.0;
    double lo = 0.0, hi = width;
    const bool endpoint_singular = alpha < 1.0;
    while (lo < R) {
      QuadratureResult q =
          (lo == 0.0 && endpoint_singular)
              ? integrate_endpoint_singular(f, lo, hi, true, false, 1e-14)
              : integrate_adaptive(f, lo, hi, 1e-15, 1e-12);
      value += q.value;
      lo = hi;
      hi = std::min(R, 4.0 * hi);
    }
    PhaseCheckRow row;
    row.lambda = lambda;
    row.integral = value;
    row.asymptote = gamma_fn(alpha) * std::pow(-lambda * sp0, -alpha) * g(0.0);
    row.ratio = row.integral / row.asymptote;
    rows.push_back(row);
  }
  return rows;
}

double theta_surrogate(double mass, double e2, double s0) {
  if (!(mass > 0.0) || !(e2 > 0.0)) throw Error("theta_surrogate: domain error");
  return std::pow(2.0, s0 - 1.0) * e2 / mass;
}

double y_q_envelope(double theta, double beta, double q, double t) {
  if (!(t > 0.0)) throw Error("y_q_envelope: t must be positive");
  return std::pow(theta / -std::expm1(-beta * t), q);
}

double z_q_normalized(double moment_gamma_q, double q, double mass) {
  if (!(q > 0.0) || !(mass > 0.0)) throw Error("z_q_normalized: domain error");
  return moment_gamma_q / (gamma_fn(q) * mass);
}

}  // namespace boltz
