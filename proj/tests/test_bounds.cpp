// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"

#include "boltz/bounds.hpp"
#include "boltz/error.hpp"
#include "boltz/rng.hpp"
#include "boltz/special_functions.hpp"

using namespace boltz;

TEST_SUITE("bounds") {
  TEST_CASE("moment production envelope constants") {
    // s = 2: constant envelope e2.
    const BoundEnvelope e2env = moment_production_envelope(1.0, 2.0, 1.0, 1.0, 2.0);
    CHECK(e2env.constants.at("K_s") == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e2env.evaluate(0.3) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e2env.evaluate(7.0) == doctest::Approx(2.0).epsilon(1e-14));

    // Benchmark constants: K_3 = 4224 and envelope 8448 at t = 1.
    const BoundEnvelope e3 = moment_production_envelope(1.0, 2.0, 1.0, 1.0, 3.0);
    CHECK(e3.constants.at("K_s") == doctest::Approx(4224.0).epsilon(1e-13));
    CHECK(e3.evaluate(1.0) == doctest::Approx(8448.0).epsilon(1e-13));

    // Monotone in s at fixed t whenever K grows.
    const BoundEnvelope e4 = moment_production_envelope(1.0, 2.0, 1.0, 1.0, 4.0);
    CHECK(e4.evaluate(1.0) > e3.evaluate(1.0));
    CHECK_THROWS_AS(moment_production_envelope(1.0, 2.0, 1.0, 1.0, 1.5), Error);
    CHECK_THROWS_AS(moment_production_envelope(0.0, 2.0, 1.0, 1.0, 3.0), Error);
  }

  TEST_CASE("exponential envelope") {
    const BoundEnvelope env = exponential_envelope(1.0, 2.0, 1.0, 1.0, 8.0);
    CHECK(env.constants.at("beta") == doctest::Approx(32.0).epsilon(1e-14));
    CHECK(env.constants.at("bound") == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(env.evaluate(1e-12) <= 1e-9);
    const double alpha_inf = std::pow(2.0, -8.0) * 0.5;
    CHECK(env.evaluate(1e9) == doctest::Approx(alpha_inf).epsilon(1e-12));
    double prev = 0.0;
    for (double t = 0.01; t < 2.0; t += 0.01) {
      const double a = env.evaluate(t);
      CHECK(a >= prev);
      prev = a;
    }
    CHECK_THROWS_AS(exponential_envelope(1.0, 2.0, 1.0, 1.0, 1.0), Error);
  }

  TEST_CASE("general exponential bound for sub-gamma exponents") {
    const BoundEnvelope env = exponential_envelope(1.0, 2.0, 1.0, 1.0, 8.0);
    // c = alpha(t), s = gamma/2 collapses to alpha_s = alpha.
    const double t = 0.7;
    const double alpha = env.evaluate(t);
    CHECK(exponential_general(env, 0.5, alpha, t) ==
          doctest::Approx((std::exp(alpha) + 2.0) * 1.0).epsilon(1e-12));
    // Decreasing in t for fixed c (alpha increases).
    const double c = 0.01;
    double prev = std::numeric_limits<double>::infinity();
    for (double tt : {0.05, 0.2, 1.0, 5.0}) {
      const double b = exponential_general(env, 0.5, c, tt);
      CHECK(b <= prev * (1.0 + 1e-12));
      prev = b;
    }
    // s -> 0+ has alpha_s -> c.
    const double tiny_s = exponential_general(env, 1e-9, c, t);
    CHECK(tiny_s == doctest::Approx((std::exp(c) + 2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(exponential_general(env, 1.0, c, t), Error);  // s = gamma
  }

  TEST_CASE("stability constants") {
    CHECK(stability_tau_constant(1.0, 4224.0, 2.0, 1.0) ==
          doctest::Approx(33808.0).epsilon(1e-13));
    // tau -> inf limit and linearity in A0.
    CHECK(stability_tau_constant(1.0, 10.0, 2.0, 1e12) ==
          doctest::Approx(48.0).epsilon(1e-9));
    CHECK(stability_tau_constant(2.0, 10.0, 2.0, 1.0) ==
          doctest::Approx(2.0 * stability_tau_constant(1.0, 10.0, 2.0, 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(stability_tau_constant(1.0, 1.0, 1.0, 0.0), Error);

    auto psi = [](double r) { return r == 0.0 ? 0.0 : r + std::cbrt(r) + 0.0; };
    CHECK(stability_zero_envelope(psi, 1.0, 0.0, 5.0) == 0.0);
    auto psi_fixed = [](double) { return 0.101; };
    CHECK(stability_zero_envelope(psi_fixed, 1.0, 0.5, 0.0) ==
          doctest::Approx(0.101 * std::exp(1.0)).epsilon(1e-13));
    // Increasing in t and d0.
    CHECK(stability_zero_envelope(psi, 1.0, 0.2, 2.0) <
          stability_zero_envelope(psi, 1.0, 0.2, 3.0));
    CHECK(stability_zero_envelope(psi, 1.0, 0.2, 2.0) <
          stability_zero_envelope(psi, 1.0, 0.4, 2.0));
  }

  TEST_CASE("ODE comparison profile Y") {
    CHECK(ode_comparison_Y(1.0, 1.0, 1.0, std::log(2.0)) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(ode_comparison_Y(3.0, 2.0, 0.5, 1e9) ==
          doctest::Approx(std::pow(1.5, 2.0)).epsilon(1e-10));
    // Central-difference residual of Y' = AY - BY^{1+eps}.
    for (double t : {0.1, 1.0, 10.0}) {
      const double A = 1.3, B = 0.7, eps = 0.8;
      const double h = 1e-6 * std::max(1.0, t);
      const double dy = (ode_comparison_Y(A, B, eps, t + h) -
                         ode_comparison_Y(A, B, eps, t - h)) / (2.0 * h);
      const double y = ode_comparison_Y(A, B, eps, t);
      const double rhs = A * y - B * std::pow(y, 1.0 + eps);
      CHECK(std::abs(dy - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));
    }
    CHECK_THROWS_AS(ode_comparison_Y(1.0, 1.0, 1.0, 0.0), Error);
  }

  TEST_CASE("ODE comparison verification") {
    const double A = 1.0, B = 1.0, eps = 1.0;
    std::vector<double> times, u;
    for (double t = 0.05; t <= 3.0; t += 0.05) {
      times.push_back(t);
      u.push_back(0.5);  // constant below (A/B)^{1/eps} = 1
    }
    CHECK(verify_ode_comparison(times, u, A, B, eps));

    std::vector<double> twice;
    for (double t : times) twice.push_back(2.0 * ode_comparison_Y(A, B, eps, t));
    CHECK_FALSE(verify_ode_comparison(times, twice, A, B, eps));

    // RK4-integrated solution of u' = Au - Bu^{1+eps} from u(t0) = Y(t0)/2
    // stays below Y (comparison principle oracle).
    std::vector<double> integ_t, integ_u;
    double t0 = 0.01;
    double uu = 0.5 * ode_comparison_Y(A, B, eps, t0);
    const double h = 1e-4;
    auto f = [&](double x) { return A * x - B * std::pow(x, 1.0 + eps); };
    for (double t = t0; t <= 2.0; t += h) {
      const double k1 = f(uu);
      const double k2 = f(uu + 0.5 * h * k1);
      const double k3 = f(uu + 0.5 * h * k2);
      const double k4 = f(uu + h * k3);
      uu += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      integ_t.push_back(t + h);
      integ_u.push_back(uu);
    }
    CHECK(verify_ode_comparison(integ_t, integ_u, A, B, eps));

    std::vector<double> bad_t{-1.0};
    std::vector<double> bad_u{0.0};
    CHECK_THROWS_AS(verify_ode_comparison(bad_t, bad_u, A, B, eps), Error);
  }

  TEST_CASE("binomial sandwich") {
    {
      const auto [lo, hi] = binomial_sandwich(2.0, 1.0, 1.0);
      CHECK(lo == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(hi == doctest::Approx(6.0).epsilon(1e-14));
    }
    {
      const auto [lo, hi] = binomial_sandwich(2.5, 1.0, 1.0);
      CHECK(lo == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(hi == doctest::Approx(7.0).epsilon(1e-14));
      CHECK(lo <= std::pow(2.0, 2.5));
      CHECK(hi >= std::pow(2.0, 2.5));
    }
    // y = 0 edge: both sums contain the x^p term.
    {
      const auto [lo, hi] = binomial_sandwich(3.7, 2.0, 0.0);
      const double xp = std::pow(2.0, 3.7);
      CHECK(lo <= xp * (1.0 + 1e-12));
      CHECK(hi >= xp * (1.0 - 1e-12));
    }
    // Random sweep of the sandwich property.
    RngStream rng(83);
    for (int rep = 0; rep < 2000; ++rep) {
      const double p = rng.uniform(1.0, 12.0);
      const double x = rng.uniform(0.0, 5.0);
      const double y = rng.uniform(0.0, 5.0);
      const auto [lo, hi] = binomial_sandwich(p, x, y);
      const double target = std::pow(x + y, p);
      CHECK(lo <= target * (1.0 + 1e-10) + 1e-12);
      CHECK(hi >= target * (1.0 - 1e-10) - 1e-12);
    }
  }

  TEST_CASE("binomial partial sums stay below 2^p") {
    for (double p = 1.0; p <= 30.0; p += 0.5) {
      double acc = 0.0;
      for (int k = 0; k <= static_cast<int>(p); ++k) {
        acc += binomial(p, k);
        CHECK(acc <= std::pow(2.0, p) * (1.0 + 1e-12));
      }
    }
  }

  TEST_CASE("beta sum estimates") {
    {
      const BetaSums b = beta_sum_estimates(3.0, 1.0);
      CHECK(b.sum == doctest::Approx(3.0).epsilon(1e-14));
      CHECK(b.bound == doctest::Approx(4.0 * std::log(3.0)).epsilon(1e-14));
      CHECK(b.sum <= b.bound);
    }
    // The 4 log p bound with the explicit constant for p in 3..100; also the
    // telescoped sum against direct Gamma evaluation.
    for (int p = 3; p <= 100; ++p) {
      const BetaSums b = beta_sum_estimates(static_cast<double>(p), 1.0);
      CHECK(b.sum <= b.bound);
      double direct = 0.0;
      const int kp = (p + 1) / 2;
      for (int k = 1; k <= kp; ++k)
        direct += binomial(static_cast<double>(p), k) *
                  beta_fn(static_cast<double>(k), static_cast<double>(p - k));
      CHECK(b.sum == doctest::Approx(direct).epsilon(1e-10));
    }
    // a > 1: ratios sum/shape bounded over the grid.
    for (double a : {1.5, 2.0, 3.0}) {
      double worst_main = 0.0, worst_shift = 0.0;
      double late_main = 0.0, late_shift = 0.0;
      for (int p = 3; p <= 100; ++p) {
        const BetaSums b = beta_sum_estimates(static_cast<double>(p), a);
        REQUIRE(b.shifted.has_value());
        const double r1 = b.sum / b.bound;
        const double r2 = b.shifted->first / b.shifted->second;
        worst_main = std::max(worst_main, r1);
        worst_shift = std::max(worst_shift, r2);
        if (p >= 80) {
          late_main = std::max(late_main, r1);
          late_shift = std::max(late_shift, r2);
        }
      }
      CHECK(std::isfinite(worst_main));
      CHECK(std::isfinite(worst_shift));
      // The tail does not grow past the early maximum (bounded ratios).
      CHECK(late_main <= worst_main * (1.0 + 1e-9));
      CHECK(late_shift <= worst_shift * (1.0 + 1e-9));
    }
    CHECK_THROWS_AS(beta_sum_estimates(2.0, 1.0), Error);
    CHECK_THROWS_AS(beta_sum_estimates(5.0, 0.5), Error);
  }

  TEST_CASE("stationary phase checks") {
    // S = -x, g = 1, alpha = 1: integral (1 - e^{-lambda R})/lambda.
    auto rows = stationary_phase_check(
        1.0, [](double) { return 1.0; }, [](double x) { return -x; }, 10.0,
        {10.0, 100.0, 1000.0});
    for (const auto& r : rows) {
      const double exact = (1.0 - std::exp(-r.lambda * 10.0)) / r.lambda;
      CHECK(r.integral == doctest::Approx(exact).epsilon(1e-9));
      CHECK(r.asymptote == doctest::Approx(1.0 / r.lambda).epsilon(1e-9));
    }
    CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(rows[2].ratio - 1.0) <= std::abs(rows[0].ratio - 1.0) + 1e-12);

    // alpha = 2: asymptote Gamma(2)/lambda^2.
    auto rows2 = stationary_phase_check(
        2.0, [](double) { return 1.0; }, [](double x) { return -x; }, 10.0, {100.0});
    CHECK(rows2[0].asymptote == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(std::abs(rows2[0].ratio - 1.0) <= 0.01);

    // Ratios approach 1 monotonically for a curved phase.
    auto rows3 = stationary_phase_check(
        1.5, [](double x) { return 1.0 + 0.2 * x; },
        [](double x) { return -x - 0.3 * x * x; }, 2.0, {10.0, 100.0, 1000.0});
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows3) {
      CHECK(std::abs(r.ratio - 1.0) <= prev + 1e-12);
      prev = std::abs(r.ratio - 1.0);
    }
    CHECK(prev <= 0.01);

    CHECK_THROWS_AS(stationary_phase_check(1.0, [](double) { return 1.0; },
                                           [](double x) { return x; }, 1.0, {10.0}),
                    Error);
  }

  TEST_CASE("Theta surrogate and Z/Y helpers") {
    // Theta = 2^{s0-1} e2/mass ties alpha(t) = (1-e^{-beta t})/(2 Theta).
    const double theta = theta_surrogate(1.0, 2.0, 8.0);
    CHECK(theta == doctest::Approx(256.0).epsilon(1e-14));
    const BoundEnvelope env = exponential_envelope(1.0, 2.0, 1.0, 1.0, 8.0);
    const double beta = env.constants.at("beta");
    for (double t : {0.1, 1.0, 3.0}) {
      const double alpha = env.evaluate(t);
      CHECK(alpha == doctest::Approx((1.0 - std::exp(-beta * t)) / (2.0 * theta))
                         .epsilon(1e-12));
      // Y_q at q = 1 matches Theta/(1 - e^{-beta t}).
      CHECK(y_q_envelope(theta, beta, 1.0, t) ==
            doctest::Approx(theta / (1.0 - std::exp(-beta * t))).epsilon(1e-12));
    }
    CHECK(z_q_normalized(4.0, 2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-13));
  }
}
