// SPDX-License-Identifier: Apache-2.0
#include "boltz/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "boltz/error.hpp"

namespace boltz {

namespace {

// Kronrod 15-point extension of Gauss 7 on [-1,1] (symmetric halves).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct GkEstimate {
  double value;
  double error;
};

GkEstimate gk15(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = h * kXgk[i];
    double fv;
    if (i == 7) {
      fv = f(c);
      resk += kWgk[7] * fv;
      resg += kWg[3] * fv;
    } else {
      const double f1 = f(c - x);
      const double f2 = f(c + x);
      fv = f1 + f2;
      resk += kWgk[i] * fv;
      if (i % 2 == 1) resg += kWg[i / 2] * fv;
    }
  }
  const double value = resk * h;
  double err = std::abs((resk - resg) * h);
  // Sharpened GK error model, as in QUADPACK.
  const double scale = std::abs(value);
  if (scale > 0.0 && err > 0.0) {
    const double r = err / scale;
    err = scale * std::min(1.0, std::pow(200.0 * r, 1.5));
  }
  return {value, err};
}

void adaptive_recurse(const Integrand& f, double a, double b, double tol, int depth,
                      int max_depth, QuadratureResult& out) {
  const GkEstimate e = gk15(f, a, b);
  if (e.error <= tol || depth >= max_depth) {
    out.value += e.value;
    out.error_estimate += e.error;
    if (e.error > tol && depth >= max_depth) out.converged = false;
    return;
  }
  const double c = 0.5 * (a + b);
  adaptive_recurse(f, a, c, 0.5 * tol, depth + 1, max_depth, out);
  adaptive_recurse(f, c, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadratureResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                                   double rel_tol, int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  const GkEstimate first = gk15(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::abs(first.value));
  if (first.error <= tol) {
    out.value = first.value;
    out.error_estimate = first.error;
    return out;
  }
  adaptive_recurse(f, a, b, tol, 0, max_depth, out);
  return out;
}

QuadratureResult integrate_endpoint_singular(const Integrand& f, double a, double b,
                                            bool singular_at_a, bool singular_at_b,
                                            double abs_tol) {
  QuadratureResult out;
  if (!(b > a)) return out;
  if (!singular_at_a && !singular_at_b) return integrate_adaptive(f, a, b, abs_tol);

  const double len = b - a;
  // Interior block, kept clear of the flagged endpoints.
  double lo = singular_at_a ? a + 0.25 * len : a;
  double hi = singular_at_b ? b - 0.25 * len : b;
  QuadratureResult mid = integrate_adaptive(f, lo, hi, 0.25 * abs_tol);
  out.value = mid.value;
  out.error_estimate = mid.error_estimate;
  out.converged = mid.converged;

  constexpr double kDivergenceThreshold = 1e12;
  constexpr int kMaxLevels = 200;

  auto sweep = [&](double endpoint, double inner_edge, bool toward_left) {
    // Geometric panels [endpoint + w/2^{k+1}, endpoint + w/2^k] (mirrored for
    // the right endpoint), plus the final closing sliver.
    double width = std::abs(inner_edge - endpoint);
    double tail = 0.0;
    double prev = 0.0;
    int growing = 0;
    for (int k = 0; k < kMaxLevels; ++k) {
      const double w1 = width * std::pow(0.5, k + 1);
      const double w0 = width * std::pow(0.5, k);
      double pa, pb;
      if (toward_left) {
        pa = endpoint + w1;
        pb = endpoint + w0;
      } else {
        pa = endpoint - w0;
        pb = endpoint - w1;
      }
      QuadratureResult panel = integrate_adaptive(f, pa, pb, 0.25 * abs_tol, 1e-12, 24);
      tail += panel.value;
      out.error_estimate += panel.error_estimate;
      if (std::abs(tail) > kDivergenceThreshold) {
        out.diverged = true;
        return tail;
      }
      if (k > 4 && std::abs(panel.value) >= std::abs(prev) && std::abs(panel.value) > abs_tol)
        ++growing;
      else
        growing = 0;
      if (growing > 40) {  // non-decaying contributions: logarithmic or worse
        out.diverged = true;
        return tail;
      }
      if (std::abs(panel.value) < 0.25 * abs_tol && k > 8) {
        // Close with the remaining sliver, assuming integrability.
        return tail;
      }
      prev = panel.value;
    }
    out.diverged = true;
    return tail;
  };

  if (singular_at_a) out.value += sweep(a, lo, true);
  if (singular_at_b) out.value += sweep(b, hi, false);
  if (out.diverged) {
    out.converged = false;
    out.value = std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Initial guess (Chebyshev), then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

GaussRule make_gauss_hermite(int n) {
  // Physicists' rule for weight exp(-x^2), built by Newton on H_n, then
  // rescaled to expectations against the standard normal.
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x;
    if (i == 0)
      x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      x = rule.nodes[n - 1] - 1.14 * std::pow(n, 0.426) / rule.nodes[n - 1];
    else if (i == 2)
      x = 1.86 * rule.nodes[n - 2] - 0.86 * rule.nodes[n - 1];
    else if (i == 3)
      x = 1.91 * rule.nodes[n - 3] - 0.91 * rule.nodes[n - 2];
    else
      x = 2.0 * rule.nodes[n - i] - rule.nodes[n - i + 1];
    double dp = 0.0;
    for (int it = 0; it < 200; ++it) {
      // Orthonormal Hermite recurrence keeps values in range.
      double p0 = std::pow(std::numbers::pi, -0.25);
      double p1 = x * std::sqrt(2.0) * p0;
      for (int k = 2; k <= n; ++k) {
        const double p2 =
            x * std::sqrt(2.0 / k) * p1 - std::sqrt((k - 1.0) / k) * p0;
        p0 = p1;
        p1 = p2;
      }
      dp = std::sqrt(2.0 * n) * p0;
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    const double w = 2.0 / (dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  // Transform: E[f(Z)] = (1/sqrt(pi)) sum w_i f(sqrt(2) x_i).
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] *= std::sqrt(2.0);
    rule.weights[i] /= sqrt_pi;
  }
  return rule;
}

template <typename MakeFn>
const GaussRule& cached_rule(int n, std::map<int, GaussRule>& cache, std::mutex& mu,
                             MakeFn make) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: order must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  return cached_rule(n, cache, mu, make_gauss_legendre);
}

const GaussRule& gauss_hermite_probabilists(int n) {
  if (n < 1) throw Error("gauss_hermite: order must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  return cached_rule(n, cache, mu, make_gauss_hermite);
}

}  // namespace boltz
