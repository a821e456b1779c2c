// SPDX-License-Identifier: Apache-2.0
#include "boltz/toolbox.hpp"

#include <cmath>
#include <limits>

#include "boltz/bounds.hpp"
#include "boltz/kernel.hpp"
#include "boltz/rng.hpp"

namespace boltz {

namespace {

ToolboxCheck check_binomial_sandwich(std::uint64_t seed, int samples) {
  ToolboxCheck out{"fractional_binomial_sandwich", true, {}, {}};
  RngStream rng(seed);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double p = rng.uniform(1.0, 14.0);
    const double x = rng.uniform(0.0, 6.0);
    const double y = rng.uniform(0.0, 6.0);
    const auto [lo, hi] = binomial_sandwich(p, x, y);
    const double target = std::pow(x + y, p);
    const double tol = 1e-10 * std::max(1.0, target);
    worst_margin = std::min({worst_margin, target - lo + tol, hi - target + tol});
    if (lo > target + tol || hi < target - tol) {
      out.pass = false;
      out.violation = "p=" + std::to_string(p) + " x=" + std::to_string(x) +
                      " y=" + std::to_string(y);
      break;
    }
  }
  out.details["samples"] = samples;
  out.details["worst_margin"] = worst_margin;
  return out;
}

ToolboxCheck check_beta_log_bound() {
  ToolboxCheck out{"beta_sum_log_bound", true, {}, {}};
  double worst_ratio = 0.0;
  for (int p = 3; p <= 100; ++p) {
    const BetaSums b = beta_sum_estimates(static_cast<double>(p), 1.0);
    worst_ratio = std::max(worst_ratio, b.sum / b.bound);
    if (b.sum > b.bound) {
      out.pass = false;
      out.violation = "p=" + std::to_string(p);
      break;
    }
  }
  out.details["worst_sum_over_bound"] = worst_ratio;
  return out;
}

ToolboxCheck check_beta_shape_bounds(const std::vector<double>& a_values) {
  ToolboxCheck out{"beta_sum_shape_bounds", true, {}, {}};
  for (double a : a_values) {
    double sup_main = 0.0, sup_shifted = 0.0;
    double late_main = 0.0, late_shifted = 0.0;
    for (int p = 3; p <= 100; ++p) {
      const BetaSums b = beta_sum_estimates(static_cast<double>(p), a);
      const double r1 = b.sum / b.bound;
      const double r2 = b.shifted->first / b.shifted->second;
      sup_main = std::max(sup_main, r1);
      sup_shifted = std::max(sup_shifted, r2);
      if (p >= 80) {
        late_main = std::max(late_main, r1);
        late_shifted = std::max(late_shifted, r2);
      }
    }
    // Empirical boundedness of sum / shape; the grid tail must not climb
    // past the overall supremum.
    if (!(late_main <= sup_main * (1.0 + 1e-9)) ||
        !(late_shifted <= sup_shifted * (1.0 + 1e-9)) || !std::isfinite(sup_main) ||
        !std::isfinite(sup_shifted)) {
      out.pass = false;
      out.violation = "a=" + std::to_string(a);
    }
    out.details["sup_ratio_3_6_a_" + std::to_string(a)] = sup_main;
    out.details["sup_ratio_3_7_a_" + std::to_string(a)] = sup_shifted;
  }
  return out;
}

ToolboxCheck check_epsilon_p() {
  ToolboxCheck out{"angular_cutoff_remainder", true, {}, {}};
  const KernelSpec hs = hard_sphere();
  const KernelConstants c = constants(hs);
  const double e3 = epsilon_p(hs, 3.0);
  out.details["epsilon_3"] = e3;
  if (std::abs(e3 - 11.0 / 15.0) > 1e-9) {
    out.pass = false;
    out.violation = "epsilon_3 deviates from 11/15 by " +
                    std::to_string(std::abs(e3 - 11.0 / 15.0));
    return out;
  }
  double prev = 1.0 + 1e-12;
  for (int p = 3; p <= 50; ++p) {
    const double e = epsilon_p(hs, static_cast<double>(p));
    const double remark_bound = 16.0 * c.A0 / (c.A2 * p);
    if (!(e > 0.0) || e > 1.0 || e > prev * (1.0 + 1e-12) ||
        e > remark_bound * (1.0 + 1e-12)) {
      out.pass = false;
      out.violation = "p=" + std::to_string(p);
      return out;
    }
    prev = e;
  }
  out.details["epsilon_50"] = prev;
  return out;
}

ToolboxCheck check_ode_comparison() {
  ToolboxCheck out{"ode_comparison_principle", true, {}, {}};
  const double A = 1.4, B = 0.6, eps = 0.75;
  std::vector<double> times, u;
  double t = 0.01;
  double uu = 0.5 * ode_comparison_Y(A, B, eps, t);
  const double h = 5e-5;
  auto f = [&](double x) { return A * x - B * std::pow(x, 1.0 + eps); };
  while (t < 3.0) {
    const double k1 = f(uu);
    const double k2 = f(uu + 0.5 * h * k1);
    const double k3 = f(uu + 0.5 * h * k2);
    const double k4 = f(uu + h * k3);
    uu += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    times.push_back(t);
    u.push_back(uu);
  }
  if (!verify_ode_comparison(times, u, A, B, eps)) {
    out.pass = false;
    out.violation = "integrated trajectory escaped the Y envelope";
  }
  double worst_residual = 0.0;
  for (double tt : {0.1, 1.0, 10.0}) {
    const double hh = 1e-6 * std::max(1.0, tt);
    const double dy = (ode_comparison_Y(A, B, eps, tt + hh) -
                       ode_comparison_Y(A, B, eps, tt - hh)) /
                      (2.0 * hh);
    const double y = ode_comparison_Y(A, B, eps, tt);
    const double rhs = A * y - B * std::pow(y, 1.0 + eps);
    worst_residual =
        std::max(worst_residual, std::abs(dy - rhs) / std::max(1.0, std::abs(rhs)));
  }
  out.details["worst_Y_residual"] = worst_residual;
  if (worst_residual > 1e-6) {
    out.pass = false;
    out.violation = "Y'(t) residual above 1e-6";
  }
  out.details["final_u_over_Y"] = u.back() / ode_comparison_Y(A, B, eps, times.back());
  return out;
}

ToolboxCheck check_stationary_phase(const std::vector<double>& lambdas) {
  ToolboxCheck out{"stationary_phase_ratios", true, {}, {}};
  for (double alpha : {1.0, 2.0}) {
    const auto rows = stationary_phase_check(
        alpha, [](double) { return 1.0; }, [](double x) { return -x; }, 10.0, lambdas);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      const double gap = std::abs(r.ratio - 1.0);
      if (gap > prev_gap + 1e-12) {
        out.pass = false;
        out.violation = "alpha=" + std::to_string(alpha) +
                        " lambda=" + std::to_string(r.lambda) + ": ratio drifted";
      }
      prev_gap = gap;
      if (r.lambda >= 1000.0 && gap > 0.01) {
        out.pass = false;
        out.violation = "alpha=" + std::to_string(alpha) + ": gap " +
                        std::to_string(gap) + " at lambda=1000";
      }
    }
    out.details["final_ratio_alpha_" + std::to_string(static_cast<int>(alpha))] =
        rows.back().ratio;
  }
  return out;
}

}  // namespace

std::vector<ToolboxCheck> run_toolbox_sweep(const ToolboxConfig& config) {
  std::vector<ToolboxCheck> checks;
  checks.push_back(check_binomial_sandwich(config.seed, config.sandwich_samples));
  checks.push_back(check_beta_log_bound());
  checks.push_back(check_beta_shape_bounds(config.a_values));
  checks.push_back(check_epsilon_p());
  checks.push_back(check_ode_comparison());
  checks.push_back(check_stationary_phase(config.lambda_values));
  return checks;
}

}  // namespace boltz
