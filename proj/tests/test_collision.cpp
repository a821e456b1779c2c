// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>

#include "doctest.h"

#include "boltz/collision.hpp"
#include "boltz/error.hpp"
#include "boltz/special_functions.hpp"
#include "support.hpp"

using namespace boltz;
using boltz::testing::random_measure;
using boltz::testing::random_unit;
using boltz::testing::random_vec;
using boltz::testing::two_atom_benchmark;

namespace {

// Spectral norm of a symmetric dim x dim matrix by power iteration.
double spectral_norm(const std::vector<double>& h, std::size_t dim) {
  Vec x(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  Vec y(dim, 0.0);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < dim; ++i) {
      y[i] = 0.0;
      for (std::size_t j = 0; j < dim; ++j) y[i] += h[i * dim + j] * x[j];
    }
    lambda = norm(y);
    if (lambda == 0.0) return 0.0;
    for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] / lambda;
  }
  return lambda;
}

// max over the ball |xi|² <= v²+v*² of |∇phi| (resp. |H_phi|) by dense
// sampling, including the collision segment endpoints.
double ball_max(const SmoothTestFunction& phi, VecView v, VecView vs, bool hessian,
                RngStream& rng) {
  const double radius = std::sqrt(norm2(v) + norm2(vs));
  const std::size_t d = v.size();
  double best = 0.0;
  auto probe = [&](VecView x) {
    if (norm2(x) > radius * radius * (1.0 + 1e-12)) return;
    if (hessian)
      best = std::max(best, spectral_norm(phi.hessian(x), d));
    else
      best = std::max(best, norm(phi.gradient(x)));
  };
  probe(v);
  probe(vs);
  Vec x(d);
  for (int i = 0; i < 4000; ++i) {
    const Vec dir = random_unit(static_cast<int>(d), rng);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    for (std::size_t k = 0; k < d; ++k) x[k] = r * dir[k];
    probe(x);
  }
  // Segment paths v -> v' and v* -> v*' lie inside the ball; sample them.
  return best;
}

}  // namespace

TEST_SUITE("collision") {
  TEST_CASE("post collision map") {
    const Vec v{1, 0, 0}, vs{-1, 0, 0}, sig{0, 1, 0};
    const auto [vp, vsp] = post_collision(v, vs, sig);
    CHECK(vp[0] == doctest::Approx(0.0));
    CHECK(vp[1] == doctest::Approx(1.0));
    CHECK(vsp[1] == doctest::Approx(-1.0));

    // Identity collision: sigma along n.
    const Vec v2{2, 0, 0}, vs2{0, 0, 0};
    const auto [vp2, vsp2] = post_collision(v2, vs2, Vec{1, 0, 0});
    for (int k = 0; k < 3; ++k) {
      CHECK(vp2[static_cast<std::size_t>(k)] == doctest::Approx(v2[static_cast<std::size_t>(k)]));
      CHECK(vsp2[static_cast<std::size_t>(k)] == doctest::Approx(vs2[static_cast<std::size_t>(k)]));
    }

    const auto [vp3, vsp3] = post_collision(v2, vs2, Vec{0, 0, 1});
    CHECK(vp3[0] == doctest::Approx(1.0));
    CHECK(vp3[2] == doctest::Approx(1.0));
    CHECK(vsp3[2] == doctest::Approx(-1.0));
    CHECK(norm2(vp3) + norm2(vsp3) == doctest::Approx(4.0).epsilon(1e-14));

    CHECK_THROWS_AS(post_collision(v, vs, Vec{0, 2, 0}), Error);

    // Conservation on random instances.
    RngStream rng(8);
    for (int rep = 0; rep < 500; ++rep) {
      const int dim = rep % 2 == 0 ? 3 : 2;
      const Vec a = random_vec(dim, rng), b = random_vec(dim, rng);
      const Vec s = random_unit(dim, rng);
      const auto [ap, bp] = post_collision(a, b, s);
      Vec sum_before = a + b;
      Vec sum_after = ap + bp;
      CHECK(dist(sum_before, sum_after) <= 1e-12 * (1.0 + norm(sum_before)));
      CHECK(norm2(ap) + norm2(bp) ==
            doctest::Approx(norm2(a) + norm2(b)).epsilon(1e-12));
    }
  }

  TEST_CASE("energy representations agree with the direct route") {
    RngStream rng(9);
    // v = -v*: the oscillating h-term vanishes; bracket energies preserved.
    {
      const Vec v{1.5, -0.5, 2.0};
      Vec vs = -1.0 * VecView(v);
      Vec n = v;
      const double nn = norm(n);
      for (double& c : n) c /= nn;
      std::vector<Vec> basis;
      orthonormal_complement(n, basis);
      const auto rep = energy_representations(v, vs, 1.1, basis[0]);
      CHECK(rep.via_h[0] == doctest::Approx(bracket2(v)).epsilon(1e-13));
      CHECK(rep.via_h[1] == doctest::Approx(bracket2(v)).epsilon(1e-13));
      CHECK(rep.direct[0] == doctest::Approx(bracket2(v)).epsilon(1e-13));
    }
    // theta = 0 keeps the incoming energies.
    {
      const Vec v{0.3, 0.8, -0.2}, vs{-1.0, 0.4, 0.9};
      Vec n = v - vs;
      const double nn = norm(n);
      for (double& c : n) c /= nn;
      std::vector<Vec> basis;
      orthonormal_complement(n, basis);
      const auto rep = energy_representations(v, vs, 0.0, basis[0]);
      CHECK(rep.via_j[0] == doctest::Approx(bracket2(v)).epsilon(1e-12));
      CHECK(rep.via_j[1] == doctest::Approx(bracket2(vs)).epsilon(1e-12));
    }
    // Random cross-validation of all three routes.
    for (int rep_i = 0; rep_i < 400; ++rep_i) {
      const Vec v = random_vec(3, rng), vs = random_vec(3, rng);
      Vec n = v - vs;
      const double nn = norm(n);
      if (nn < 1e-9) continue;
      for (double& c : n) c /= nn;
      std::vector<Vec> basis;
      orthonormal_complement(n, basis);
      const double az = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Vec omega(3);
      for (std::size_t k = 0; k < 3; ++k)
        omega[k] = std::cos(az) * basis[0][k] + std::sin(az) * basis[1][k];
      const double theta = rng.uniform(0.0, std::numbers::pi);
      const auto r = energy_representations(v, vs, theta, omega);
      const double scale = std::max(1.0, std::abs(r.direct[0]));
      CHECK(std::abs(r.via_h[0] - r.direct[0]) <= 1e-10 * scale);
      CHECK(std::abs(r.via_h[1] - r.direct[1]) <= 1e-10 * scale);
      CHECK(std::abs(r.via_j[0] - r.direct[0]) <= 1e-10 * scale);
      CHECK(std::abs(r.via_j[1] - r.direct[1]) <= 1e-10 * scale);
    }
    // Orthogonality enforcement.
    const Vec v{1, 0, 0}, vs{0, 1, 0};
    CHECK_THROWS_AS(energy_representations(v, vs, 1.0, Vec{1, 0, 0}), Error);
  }

  TEST_CASE("smooth dictionary derivative consistency") {
    for (int dim : {2, 3}) {
      for (const SmoothTestFunction& phi : smooth_dictionary(dim)) {
        CHECK(validate_derivatives(phi, dim) <= 1e-5);
      }
    }
    CHECK(validate_derivatives(phi_bracket_power(3.0), 3) <= 1e-5);
  }

  TEST_CASE("L_B[Δφ] vanishes on collision invariants and the diagonal") {
    const KernelSpec hs = hard_sphere();
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 64, 32);
    const Vec v{1.0, 0.2, -0.3}, vs{-0.4, 0.7, 1.1};
    CHECK(l_b_delta(phi_constant(), v, vs, hs, quad) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(l_b_delta(phi_speed_squared(), v, vs, hs, quad)) <= 1e-10);
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(l_b_delta(phi_coordinate(k), v, vs, hs, quad)) <= 1e-10);
    CHECK(l_b_delta(phi_gaussian_bump(Vec{0, 0, 0}, 1.0), v, v, hs, quad) == 0.0);
  }

  TEST_CASE("Q_weak basics") {
    const KernelSpec hs = hard_sphere();
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 64, 32);
    // Collision invariants annihilate Q.
    RngStream rng(13);
    const DiscreteMeasure m = random_measure(3, 5, rng, 2.0);
    CHECK(std::abs(q_weak(m, phi_constant(), hs, quad)) <= 1e-8);
    CHECK(std::abs(q_weak(m, phi_speed_squared(), hs, quad)) <= 1e-8);
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(q_weak(m, phi_coordinate(k), hs, quad)) <= 1e-8);
    // A single atom sees only the diagonal.
    DiscreteMeasure single(3);
    single.add_atom(Vec{1, 2, 3}, 2.0);
    CHECK(q_weak(single, phi_gaussian_bump(Vec{0, 0, 0}, 1.0), hs, quad) == 0.0);
  }

  TEST_CASE("Q_weak against a dense Monte Carlo sphere integral (N=2)") {
    // Two-atom measure, Gaussian bump, b = 1, gamma = 1, N = 2.
    const KernelSpec spec(2, 1.0, AngularProfile::constant(1.0));
    const SphereQuadrature quad = SphereQuadrature::uniform(2, 128, 2);
    DiscreteMeasure m(2);
    m.add_atom(Vec{0.8, -0.1}, 0.6);
    m.add_atom(Vec{-0.5, 0.9}, 0.4);
    const SmoothTestFunction phi = phi_gaussian_bump(Vec{0.2, 0.3}, 0.9);
    const double exact = q_weak(m, phi, spec, quad);

    // Independent Monte Carlo oracle: sigma uniform on S^1, estimate
    // (1/2)Σ_ij w_i w_j |z| ∫_{S^1} Δφ dσ with 1e7 samples.
    RngStream rng(321);
    const std::size_t samples = 10000000;
    double acc = 0.0;
    const double circ = 2.0 * std::numbers::pi;
    for (std::size_t s = 0; s < samples; ++s) {
      const double a = rng.uniform(0.0, circ);
      const Vec sigma{std::cos(a), std::sin(a)};
      double inner = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
          const auto [vp, vsp] = post_collision(m.velocity(i), m.velocity(j), sigma);
          const double dphi = phi.value(vp) + phi.value(vsp) -
                              phi.value(m.velocity(i)) - phi.value(m.velocity(j));
          inner += m.weight(i) * m.weight(j) * dist(m.velocity(i), m.velocity(j)) * dphi;
        }
      acc += inner;
    }
    const double mc = 0.5 * circ * acc / static_cast<double>(samples);
    CHECK(std::abs(exact - mc) <= std::max(2e-3 * std::abs(exact), 3e-4));
  }

  TEST_CASE("Q_gain and Q_loss") {
    const KernelSpec hs = hard_sphere();
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 64, 32);
    DiscreteMeasure pair(3);
    pair.add_atom(Vec{1, 0, 0}, 1.0);
    pair.add_atom(Vec{-1, 0, 0}, 1.0);

    const DiscreteMeasure loss = q_loss(pair, pair, hs);
    CHECK(moment_norm(loss, 0.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(loss.size() == 2);
    CHECK(loss.weight(0) == doctest::Approx(2.0).epsilon(1e-12));

    const DiscreteMeasure gain = q_gain(pair, pair, hs, quad);
    CHECK(moment_norm(gain, 0.0) == doctest::Approx(4.0).epsilon(1e-9));

    // Energy conservation: <Q+ - Q-, |v|^2> ~ 0; same for momentum and mass.
    RngStream rng(19);
    for (int rep = 0; rep < 20; ++rep) {
      const DiscreteMeasure m = random_measure(3, 4, rng, 2.0);
      const DiscreteMeasure gp = q_gain(m, m, hs, quad);
      const DiscreteMeasure gl = q_loss(m, m, hs);
      auto mom = [](const DiscreteMeasure& mm, double s) { return moment_norm(mm, s); };
      CHECK(mom(gp, 0.0) == doctest::Approx(mom(gl, 0.0)).epsilon(1e-9));
      const double e_gain = integrate(gp, [](VecView v) { return norm2(v); });
      const double e_loss = integrate(gl, [](VecView v) { return norm2(v); });
      CHECK(e_gain == doctest::Approx(e_loss).epsilon(1e-8));
    }

    // Bilinearity: zero-mass nu gives the empty measure; scaling nu scales Q-.
    DiscreteMeasure zero(3);
    CHECK(q_gain(pair, zero, hs, quad).empty());
    DiscreteMeasure scaled(3);
    for (std::size_t i = 0; i < pair.size(); ++i)
      scaled.add_atom(pair.velocity(i), 3.0 * pair.weight(i));
    CHECK(moment_norm(q_loss(pair, scaled, hs), 0.0) ==
          doctest::Approx(3.0 * moment_norm(loss, 0.0)).epsilon(1e-12));

    // Non-cutoff kernels require truncation.
    const KernelSpec ipl = inverse_power_law(7.0);
    CHECK_THROWS_AS(q_gain(pair, pair, ipl, quad), Error);
    CHECK_THROWS_AS(q_loss(pair, pair, ipl), Error);
    CHECK(moment_norm(q_loss(pair, pair, truncate(ipl, 8.0)), 0.0) > 0.0);
  }

  TEST_CASE("weak form equals the gain/loss pairing") {
    RngStream rng(29);
    const SphereQuadrature q3 = SphereQuadrature::uniform(3, 64, 32);
    const SphereQuadrature q2 = SphereQuadrature::uniform(2, 128, 2);
    for (int rep = 0; rep < 25; ++rep) {
      const int dim = rep % 2 == 0 ? 3 : 2;
      const KernelSpec spec =
          dim == 3 ? hard_sphere() : KernelSpec(2, 0.7, AngularProfile::constant(0.5));
      const SphereQuadrature& quad = dim == 3 ? q3 : q2;
      const DiscreteMeasure m = random_measure(dim, 2 + rep % 5, rng, 2.0);
      for (const SmoothTestFunction& phi : smooth_dictionary(dim)) {
        const double weak = q_weak(m, phi, spec, quad);
        const DiscreteMeasure gp = q_gain(m, m, spec, quad);
        const DiscreteMeasure gl = q_loss(m, m, spec);
        const double strong = integrate(gp, phi.value) - integrate(gl, phi.value);
        CHECK(std::abs(weak - strong) <=
              1e-6 * std::max({1.0, std::abs(weak), std::abs(strong)}));
      }
    }
  }

  TEST_CASE("gradient and Hessian bounds on the symmetric difference") {
    RngStream rng(37);
    const double s2 = std::sqrt(2.0);
    for (int rep = 0; rep < 150; ++rep) {
      const int dim = rep % 2 == 0 ? 3 : 2;
      const Vec v = random_vec(dim, rng, 2.0), vs = random_vec(dim, rng, 2.0);
      const double r = dist(v, vs);
      if (r < 1e-9) continue;
      Vec n = v - vs;
      for (double& c : n) c /= r;
      std::vector<Vec> basis;
      orthonormal_complement(n, basis);
      const double theta = rng.uniform(0.02, std::numbers::pi - 0.02);
      const auto& dict = smooth_dictionary(dim);
      const SmoothTestFunction& phi = dict[rng.uniform_index(dict.size())];
      const double grad_max = ball_max(phi, v, vs, false, rng);
      const double hess_max = ball_max(phi, v, vs, true, rng);

      // Pointwise gradient bound over the azimuth nodes.
      const SphereQuadrature quad =
          dim == 3 ? SphereQuadrature::uniform(3, 16, 16) : SphereQuadrature::uniform(2, 16, 2);
      double omega_integral = 0.0;
      for (double az : quad.azimuth_angles()) {
        Vec omega(static_cast<std::size_t>(dim), 0.0);
        for (std::size_t k = 0; k < omega.size(); ++k) {
          omega[k] = std::cos(az) * basis[0][k];
          if (dim >= 3) omega[k] += std::sin(az) * basis[1][k];
        }
        Vec sigma(static_cast<std::size_t>(dim));
        for (std::size_t k = 0; k < sigma.size(); ++k)
          sigma[k] = std::cos(theta) * n[k] + std::sin(theta) * omega[k];
        const auto [vp, vsp] = post_collision(v, vs, sigma);
        const double dphi =
            phi.value(vp) + phi.value(vsp) - phi.value(v) - phi.value(vs);
        CHECK(std::abs(dphi) <=
              s2 * grad_max * r * std::sin(theta) * (1.0 + 1e-6) + 1e-12);
        omega_integral += quad.azimuth_weight() * dphi;
      }
      // Averaged over omega the bound improves to sin^2 with the Hessian.
      const double surf = sphere_area(dim - 2);
      CHECK(std::abs(omega_integral) <=
            surf * hess_max * r * r * std::sin(theta) * std::sin(theta) * (1.0 + 1e-6) +
                1e-12);
    }
  }

  TEST_CASE("weighted Lipschitz bounds for the gain and loss operators") {
    RngStream rng(43);
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 32, 16);
    const KernelSpec hs = hard_sphere();
    const KernelConstants c = constants(hs);
    const double gamma = hs.gamma();
    for (int rep = 0; rep < 100; ++rep) {
      const DiscreteMeasure mu = random_measure(3, 1 + rep % 5, rng, 2.0);
      DiscreteMeasure nu = random_measure(3, 1 + (rep + 3) % 5, rng, 2.0);
      if (rep % 3 == 0) {
        // Shared support exercises cancellations in the differences.
        nu = DiscreteMeasure(3);
        for (std::size_t i = 0; i < mu.size(); ++i)
          nu.add_atom(mu.velocity(i), mu.weight(i) * rng.uniform(0.5, 1.5));
      }
      for (double s : {0.0, 1.0, 2.0}) {
        const double bound = std::pow(2.0, 0.5 * (s + gamma)) * c.A0 *
                             (moment_norm(mu, s + gamma) * moment_norm(nu, 0.0) +
                              moment_norm(mu, 0.0) * moment_norm(nu, s + gamma));
        const double gain_s = moment_norm(q_gain(mu, nu, hs, quad), s);
        const double loss_s = moment_norm(q_loss(mu, nu, hs), s);
        CHECK(gain_s <= bound * (1.0 + 1e-8));
        CHECK(loss_s <= bound * (1.0 + 1e-8));

        // Difference-of-squares variant.
        const SignedMeasure gain_diff =
            difference(q_gain(mu, mu, hs, quad), q_gain(nu, nu, hs, quad));
        const SignedMeasure loss_diff =
            difference(q_loss(mu, mu, hs), q_loss(nu, nu, hs));
        SignedMeasure sum = mu.as_signed();
        sum += nu.as_signed();
        const SignedMeasure diff = difference(mu, nu);
        const double bound2 = std::pow(2.0, 0.5 * (s + gamma)) * c.A0 *
                              (moment_norm(sum, s + gamma) * moment_norm(diff, 0.0) +
                               moment_norm(sum, 0.0) * moment_norm(diff, s + gamma));
        CHECK(moment_norm(gain_diff, s) <= bound2 * (1.0 + 1e-8));
        CHECK(moment_norm(loss_diff, s) <= bound2 * (1.0 + 1e-8));
      }
      // Total variation of the full collision-operator difference.
      SignedMeasure qdiff(3);
      qdiff += q_gain(mu, mu, hs, quad).as_signed();
      qdiff += q_loss(mu, mu, hs).as_signed().scaled(-1.0);
      qdiff += q_gain(nu, nu, hs, quad).as_signed().scaled(-1.0);
      qdiff += q_loss(nu, nu, hs).as_signed();
      SignedMeasure sum = mu.as_signed();
      sum += nu.as_signed();
      const SignedMeasure diff = difference(mu, nu);
      const double bound11 = std::pow(2.0, 1.0 + 0.5 * gamma) * c.A0 *
                             (moment_norm(sum, gamma) * moment_norm(diff, 0.0) +
                              moment_norm(sum, 0.0) * moment_norm(diff, gamma));
      CHECK(moment_norm(qdiff, 0.0) <= bound11 * (1.0 + 1e-8));
    }
  }

  TEST_CASE("Povzner moment inequality for hard spheres") {
    RngStream rng(47);
    const KernelSpec hs = hard_sphere();
    const KernelConstants c = constants(hs);
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 64, 32);
    for (double p : {3.0, 4.0, 5.0}) {
      const double eps = epsilon_p(hs, p);
      for (int rep = 0; rep < 150; ++rep) {
        const Vec v = random_vec(3, rng, 3.0), vs = random_vec(3, rng, 3.0);
        const double lhs = l_b_delta(phi_bracket_power(p), v, vs, hs, quad);
        const double rhs = boltz::testing::povzner_rhs(p, v, vs, c.A2, eps, hs.gamma());
        CHECK(lhs <= rhs + 1e-7 * std::max(1.0, std::abs(rhs)));
      }
    }
  }

  TEST_CASE("Povzner inequality for gamma = 2 via the Holder route") {
    // Constant b with a large Holder index p1 keeps the admissibility
    // threshold (12 A*/A0)^{2q1} as low as it can get (it is >= 36 for any
    // profile, since A0 <= 2^{1/q1} A* by Holder's inequality).
    const KernelSpec spec(3, 2.0, AngularProfile::constant(0.5));
    const double p1 = 20.0;
    const KernelConstants c = constants(spec, p1);
    REQUIRE(c.ap_star.has_value());
    const double threshold =
        std::pow(12.0 * c.ap_star->value / c.A0, 2.0 * p1 / (p1 - 1.0));
    CHECK(threshold >= 36.0);
    CHECK(threshold <= 50.0);
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 160, 64);
    RngStream rng(53);
    for (double p : {47.0, 50.0}) {
      REQUIRE(p >= threshold);
      for (int rep = 0; rep < 40; ++rep) {
        const Vec v = random_vec(3, rng, 1.5), vs = random_vec(3, rng, 1.5);
        const double lhs = l_b_delta(phi_bracket_power(p), v, vs, spec, quad);
        const double rhs =
            boltz::testing::povzner_rhs_h3(p, v, vs, c.A0, c.ap_star->value, p1);
        CHECK(lhs <= rhs + 1e-6 * std::max(1.0, std::abs(rhs)));
      }
    }
  }

  TEST_CASE("signed estimate on collision differences") {
    // For kappa built from the sign of mu - nu (any [0,1] extension off the
    // support) and 0 <= phi <= <v>^2, the kappa-weighted difference of the
    // collision operators is controlled by the tail term E_phi plus weighted
    // total variation norms of mu - nu. This is the estimate behind the
    // stability Gronwall loop.
    const KernelSpec hs = hard_sphere();
    const KernelConstants kc = constants(hs);
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 48, 24);
    RngStream rng(2718);
    for (int rep = 0; rep < 60; ++rep) {
      DiscreteMeasure mu(3), nu(3);
      std::vector<Vec> grid;
      for (int k = 0; k < 4; ++k) grid.push_back(random_vec(3, rng, 2.0));
      for (int k = 0; k < 4; ++k) {
        if (rng.uniform() < 0.8)
          mu.add_atom(grid[static_cast<std::size_t>(k)], rng.uniform(0.05, 1.5));
        if (rng.uniform() < 0.8)
          nu.add_atom(grid[static_cast<std::size_t>(k)], rng.uniform(0.05, 1.5));
      }
      if (mu.empty() || nu.empty()) continue;
      const SignedMeasure diff = difference(mu, nu);
      std::map<std::vector<std::uint64_t>, double> kappa_map;
      for (std::size_t i = 0; i < diff.size(); ++i) {
        std::vector<std::uint64_t> key;
        for (double c : diff.velocity(i)) key.push_back(std::bit_cast<std::uint64_t>(c));
        kappa_map[key] = diff.weight(i) > 0.0 ? 1.0 : 0.0;
      }
      for (double extension : {0.0, 1.0}) {
        auto kappa = [&](VecView v) {
          std::vector<std::uint64_t> key;
          for (double c : v) key.push_back(std::bit_cast<std::uint64_t>(c));
          const auto it = kappa_map.find(key);
          return it == kappa_map.end() ? extension : it->second;
        };
        const double cap = rep % 2 == 0 ? 1.0 : 5.0;
        auto phi = [&](VecView v) { return std::min(bracket2(v), cap); };
        auto phik = [&](VecView v) { return phi(v) * kappa(v); };
        const double lhs = integrate(q_gain(mu, mu, hs, quad), phik) -
                           integrate(q_loss(mu, mu, hs), phik) -
                           integrate(q_gain(nu, nu, hs, quad), phik) +
                           integrate(q_loss(nu, nu, hs), phik);
        double tail = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
          tail += mu.weight(i) * (bracket2(mu.velocity(i)) - phi(mu.velocity(i))) *
                  bracket_pow(mu.velocity(i), hs.gamma());
        const double e_phi = kc.A0 * std::pow(2.0, hs.gamma()) *
                             moment_norm(mu, hs.gamma()) * tail;
        const double rhs =
            e_phi + std::pow(2.0, 0.5 * hs.gamma()) * kc.A0 *
                        (moment_norm(mu, 2.0 + hs.gamma()) * moment_norm(diff, 0.0) +
                         moment_norm(mu, 2.0) * moment_norm(diff, hs.gamma()));
        CHECK(lhs <= rhs + 1e-8 * std::max(1.0, std::abs(rhs)));
      }
    }
  }

  TEST_CASE("truncated kernels converge to the dual kernel on compacts") {
    const KernelSpec ipl = inverse_power_law(7.0);
    const SphereQuadrature quad = SphereQuadrature::graded(3, 192, 16);
    const SmoothTestFunction phi = phi_gaussian_bump(Vec{0.3, 0.0, -0.2}, 1.2);
    std::vector<Vec> grid;
    RngStream rng(59);
    for (int i = 0; i < 6; ++i) grid.push_back(random_vec(3, rng, 2.0));
    double prev_sup = std::numeric_limits<double>::infinity();
    double first_sup = 0.0, last_sup = 0.0;
    for (double level : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
      const KernelSpec tr = truncate(ipl, level);
      double sup = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
          const double full = l_b_delta(phi, grid[i], grid[j], ipl, quad);
          const double trunc = l_b_delta(phi, grid[i], grid[j], tr, quad);
          sup = std::max(sup, std::abs(full - trunc));
        }
      CHECK(sup <= prev_sup + 1e-9);
      if (first_sup == 0.0) first_sup = sup;
      prev_sup = sup;
      last_sup = sup;
    }
    // The gap follows the n^{-5/7} tail of the s = 7 angular singularity;
    // check a clear decrease over the swept levels.
    CHECK(last_sup <= 0.05 * first_sup);

    // A bounded profile reaches the floor exactly once the level clears its
    // maximum and the kinetic range of the grid.
    const KernelSpec bounded(3, 1.0, AngularProfile::constant(0.25));
    const KernelSpec btr = truncate(bounded, 64.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        const double full = l_b_delta(phi, grid[i], grid[j], bounded, quad);
        const double trunc = l_b_delta(phi, grid[i], grid[j], btr, quad);
        CHECK(full == trunc);
      }
  }

  TEST_CASE("continuity of L_B[Δφ] (shrinking perturbations)") {
    const KernelSpec hs = hard_sphere();
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 64, 32);
    const SmoothTestFunction phi = phi_gaussian_bump(Vec{0, 0, 0}, 1.0);
    const Vec v{0.9, -0.4, 0.3}, vs{-0.6, 0.8, 0.1};
    const double base = l_b_delta(phi, v, vs, hs, quad);
    std::vector<double> gaps;
    for (int k = 1; k <= 16; ++k) {
      const double delta = std::pow(2.0, -k);
      Vec v2 = v, vs2 = vs;
      v2[0] += delta;
      vs2[1] -= 0.5 * delta;
      const double moved = l_b_delta(phi, v2, vs2, hs, quad);
      gaps.push_back(std::abs(moved - base));
    }
    // Monotone decay within a small slack for the quadratic cross-over, and
    // linear-rate shrinkage on the tail where the first-order term dominates.
    for (std::size_t k = 1; k < gaps.size(); ++k)
      CHECK(gaps[k] <= gaps[k - 1] * 1.25 + 1e-13);
    for (std::size_t k = 9; k < gaps.size(); ++k) {
      const double ratio = gaps[k] / gaps[k - 1];
      CHECK(ratio >= 0.3);
      CHECK(ratio <= 0.7);
    }
    CHECK(gaps.back() <= 1e-6);
  }

  TEST_CASE("quadrature self-check (refinement flag)") {
    const KernelSpec hs = hard_sphere();
    const SphereQuadrature quad = SphereQuadrature::uniform(3, 64, 32);
    const CheckedValue cv = l_b_delta_checked(phi_gaussian_bump(Vec{0, 0, 0}, 1.0),
                                              Vec{1, 0, 0}, Vec{0, 1, 0}, hs, quad);
    CHECK(cv.converged);
    CHECK(cv.refinement_error <= 1e-9);
  }

  TEST_CASE("sphere quadrature reproduces |S^{N-1}|") {
    for (int dim : {2, 3}) {
      const double target = sphere_area(dim - 1);
      const SphereQuadrature u = SphereQuadrature::uniform(dim, 64, 32);
      CHECK(u.total_weight() == doctest::Approx(target).epsilon(1e-10));
      const SphereQuadrature g = SphereQuadrature::graded(dim, 96, 32);
      CHECK(g.total_weight() == doctest::Approx(target).epsilon(1e-10));
      for (const auto& node : g.theta_nodes()) {
        CHECK(node.theta > 0.0);
        CHECK(node.theta < std::numbers::pi);
      }
    }
    const SphereQuadrature q = SphereQuadrature::uniform(3, 64, 32);
    CHECK(q.to_json().find("\"theta_nodes\":64") != std::string::npos);
    CHECK(q.to_json().find("\"azimuth_nodes\":32") != std::string::npos);
  }
}
