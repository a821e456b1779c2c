// SPDX-License-Identifier: Apache-2.0
#include "boltz/collision.hpp"

#include <cmath>

#include "boltz/error.hpp"

namespace boltz {

namespace {

void check_unit(VecView sigma, double tol, const char* who) {
  if (std::abs(norm2(sigma) - 1.0) > tol)
    throw Error(std::string(who) + ": sigma must be a unit vector");
}

// n = (v - v*)/|v - v*|, or e1 when v = v*.
Vec collision_axis(VecView v, VecView v_star, double* r_out) {
  Vec n(v.size(), 0.0);
  const double r = dist(v, v_star);
  if (r_out) *r_out = r;
  if (r == 0.0) {
    n[0] = 1.0;
    return n;
  }
  for (std::size_t i = 0; i < v.size(); ++i) n[i] = (v[i] - v_star[i]) / r;
  return n;
}

}  // namespace

std::pair<Vec, Vec> post_collision(VecView v, VecView v_star, VecView sigma) {
  if (v.size() != v_star.size() || v.size() != sigma.size())
    throw Error("post_collision: dimension mismatch");
  check_unit(sigma, 1e-12, "post_collision");
  const double r = dist(v, v_star);
  Vec vp(v.size()), vsp(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double center = 0.5 * (v[i] + v_star[i]);
    const double offset = 0.5 * r * sigma[i];
    vp[i] = center + offset;
    vsp[i] = center - offset;
  }
  return {std::move(vp), std::move(vsp)};
}

void post_collision_inplace(std::span<double> v, std::span<double> v_star, VecView sigma) {
  const double r = dist(VecView(v.data(), v.size()), VecView(v_star.data(), v_star.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double center = 0.5 * (v[i] + v_star[i]);
    const double offset = 0.5 * r * sigma[i];
    v[i] = center + offset;
    v_star[i] = center - offset;
  }
}

EnergyRepresentations energy_representations(VecView v, VecView v_star, double theta,
                                             VecView omega) {
  const std::size_t d = v.size();
  double r = 0.0;
  const Vec n = collision_axis(v, v_star, &r);
  if (std::abs(norm2(omega) - 1.0) > 1e-10)
    throw Error("energy_representations: omega must be a unit vector");
  if (std::abs(dot(omega, n)) > 1e-10)
    throw Error("energy_representations: omega must be orthogonal to n");

  // sigma = cos(theta) n + sin(theta) omega
  Vec sigma(d);
  const double ct = std::cos(theta), st = std::sin(theta);
  for (std::size_t i = 0; i < d; ++i) sigma[i] = ct * n[i] + st * omega[i];

  const double b2v = bracket2(v), b2vs = bracket2(v_star);
  const double half_sum = 0.5 * (b2v + b2vs);

  // h-representation.
  Vec vpvs = v + v_star;
  const double svp = norm(vpvs);
  Vec h(d, 0.0);
  if (svp > 0.0)
    for (std::size_t i = 0; i < d; ++i) h[i] = vpvs[i] / svp;
  else
    h[0] = 1.0;
  const double osc_h = 0.5 * svp * r * dot(h, sigma);

  EnergyRepresentations out;
  out.via_h = {half_sum + osc_h, half_sum - osc_h};

  // j-representation.
  const double hn = dot(h, n);
  Vec j(d, 0.0);
  const double rad = 1.0 - hn * hn;
  if (rad > 0.0 && std::abs(hn) < 1.0) {
    const double den = std::sqrt(rad);
    for (std::size_t i = 0; i < d; ++i) j[i] = (h[i] - hn * n[i]) / den;
  } else {
    j[0] = 1.0;
  }
  const double cross = norm2(v) * norm2(v_star) - dot(v, v_star) * dot(v, v_star);
  const double osc_j = std::sqrt(std::max(0.0, cross)) * st * dot(j, omega);
  const double c2 = 0.5 * (1.0 + ct);  // cos²(theta/2)
  const double s2 = 0.5 * (1.0 - ct);  // sin²(theta/2)
  out.via_j = {b2v * c2 + b2vs * s2 + osc_j, b2v * s2 + b2vs * c2 - osc_j};

  const auto [vp, vsp] = post_collision(v, v_star, sigma);
  out.direct = {bracket2(vp), bracket2(vsp)};
  return out;
}

namespace {

struct LocalFrame {
  Vec n;
  std::vector<Vec> basis;  // orthonormal complement of n
  double r = 0.0;
};

LocalFrame make_frame(VecView v, VecView v_star) {
  LocalFrame f;
  f.n = collision_axis(v, v_star, &f.r);
  orthonormal_complement(f.n, f.basis);
  return f;
}

// Sum over the azimuth circle (two points for N = 2) of Δφ at fixed theta.
double azimuth_sum(const SmoothTestFunction& phi, VecView v, VecView v_star,
                   const LocalFrame& frame, const SphereQuadrature& quad, double theta,
                   double phi_v, double phi_vs) {
  const std::size_t d = v.size();
  const double ct = std::cos(theta), st = std::sin(theta);
  Vec sigma(d), vp(d), vsp(d);
  double acc = 0.0;
  for (double az : quad.azimuth_angles()) {
    const double ca = std::cos(az), sa = std::sin(az);
    for (std::size_t i = 0; i < d; ++i) {
      double omega_i = ca * frame.basis[0][i];
      if (d >= 3) omega_i += sa * frame.basis[1][i];
      sigma[i] = ct * frame.n[i] + st * omega_i;
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double center = 0.5 * (v[i] + v_star[i]);
      const double offset = 0.5 * frame.r * sigma[i];
      vp[i] = center + offset;
      vsp[i] = center - offset;
    }
    acc += phi.value(vp) + phi.value(vsp) - phi_v - phi_vs;
  }
  return acc * quad.azimuth_weight();
}

}  // namespace

double l_b_delta(const SmoothTestFunction& phi, VecView v, VecView v_star,
                 const KernelSpec& spec, const SphereQuadrature& quad) {
  if (static_cast<int>(v.size()) != quad.dimension() || v.size() != v_star.size())
    throw Error("l_b_delta: dimension mismatch");
  LocalFrame frame = make_frame(v, v_star);
  if (frame.r == 0.0) return 0.0;  // kinetic factor |z|^gamma vanishes
  const double kin = spec.kinetic(frame.r);
  const double phi_v = phi.value(v), phi_vs = phi.value(v_star);
  std::vector<double> terms;
  terms.reserve(quad.theta_nodes().size());
  for (const SphereQuadrature::ThetaNode& node : quad.theta_nodes()) {
    const double inner =
        azimuth_sum(phi, v, v_star, frame, quad, node.theta, phi_v, phi_vs);
    terms.push_back(node.weight * spec.b(node.theta) * inner);
  }
  return kin * pairwise_sum(terms);
}

CheckedValue l_b_delta_checked(const SmoothTestFunction& phi, VecView v, VecView v_star,
                               const KernelSpec& spec, const SphereQuadrature& quad,
                               double tol) {
  CheckedValue out;
  out.value = l_b_delta(phi, v, v_star, spec, quad);
  const double fine = l_b_delta(phi, v, v_star, spec, quad.refined());
  out.refinement_error = std::abs(fine - out.value);
  out.converged =
      out.refinement_error <= tol * std::max({1.0, std::abs(out.value), std::abs(fine)});
  return out;
}

double q_weak(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
              const SmoothTestFunction& phi, const KernelSpec& spec,
              const SphereQuadrature& quad) {
  if (mu.dimension() != nu.dimension()) throw Error("q_weak: dimension mismatch");
  std::vector<double> terms;
  terms.reserve(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double w = mu.weight(i) * nu.weight(j);
      if (w == 0.0) {
        terms.push_back(0.0);
        continue;
      }
      terms.push_back(w * l_b_delta(phi, mu.velocity(i), nu.velocity(j), spec, quad));
    }
  }
  return 0.5 * pairwise_sum(terms);
}

double q_weak(const DiscreteMeasure& mu, const SmoothTestFunction& phi,
              const KernelSpec& spec, const SphereQuadrature& quad) {
  return q_weak(mu, mu, phi, spec, quad);
}

DiscreteMeasure q_gain(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const KernelSpec& spec, const SphereQuadrature& quad) {
  if (mu.dimension() != nu.dimension()) throw Error("q_gain: dimension mismatch");
  const KernelConstants c = spec.constants_cached();
  if (!std::isfinite(c.A0))
    throw Error("q_gain: A0 infinite (non-cutoff kernel without truncation)");
  const std::size_t d = static_cast<std::size_t>(mu.dimension());
  DiscreteMeasure out(mu.dimension());
  out.reserve(mu.size() * nu.size() * quad.theta_nodes().size() *
              quad.azimuth_angles().size());
  Vec sigma(d), vp(d);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    VecView vi = mu.velocity(i);
    for (std::size_t j = 0; j < nu.size(); ++j) {
      VecView vj = nu.velocity(j);
      const double w = mu.weight(i) * nu.weight(j);
      if (w == 0.0) continue;
      LocalFrame frame = make_frame(vi, vj);
      const double kin = spec.kinetic(frame.r);
      if (kin == 0.0) continue;
      for (const SphereQuadrature::ThetaNode& node : quad.theta_nodes()) {
        const double ct = std::cos(node.theta), st = std::sin(node.theta);
        const double bw = spec.b(node.theta) * node.weight * quad.azimuth_weight();
        if (bw == 0.0) continue;
        for (double az : quad.azimuth_angles()) {
          const double ca = std::cos(az), sa = std::sin(az);
          for (std::size_t k = 0; k < d; ++k) {
            double omega_k = ca * frame.basis[0][k];
            if (d >= 3) omega_k += sa * frame.basis[1][k];
            sigma[k] = ct * frame.n[k] + st * omega_k;
          }
          for (std::size_t k = 0; k < d; ++k)
            vp[k] = 0.5 * (vi[k] + vj[k]) + 0.5 * frame.r * sigma[k];
          out.add_atom(vp, w * kin * bw);
        }
      }
    }
  }
  return out;
}

DiscreteMeasure q_loss(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const KernelSpec& spec) {
  if (mu.dimension() != nu.dimension()) throw Error("q_loss: dimension mismatch");
  const KernelConstants c = spec.constants_cached();
  if (!std::isfinite(c.A0))
    throw Error("q_loss: A0 infinite (non-cutoff kernel without truncation)");
  DiscreteMeasure out(mu.dimension());
  out.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<double> terms(nu.size());
    for (std::size_t j = 0; j < nu.size(); ++j)
      terms[j] = nu.weight(j) * spec.kinetic(dist(mu.velocity(i), nu.velocity(j)));
    const double w = mu.weight(i) * c.A0 * pairwise_sum(terms);
    if (w != 0.0) out.add_atom(mu.velocity(i), w);
  }
  return out;
}

}  // namespace boltz
