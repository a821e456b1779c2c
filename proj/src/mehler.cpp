// SPDX-License-Identifier: Apache-2.0
#include "boltz/mehler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "boltz/error.hpp"
#include "boltz/quadrature.hpp"

namespace boltz {

namespace {

struct Mixture {
  // f₀ⁿ as a mixture of isotropic Gaussians: Σ_j w_j N(c_j, s² I).
  int dim = 0;
  double rho = 0.0;
  double s2 = 0.0;  // component variance e^{-2n} T
  std::vector<Vec> centers;
  std::vector<double> weights;
};

Mixture build_mixture(const DiscreteMeasure& f0, double n, const MehlerParams& p) {
  if (p.degenerate) throw Error("mehler: degenerate source (T = 0); Dirac inputs are "
                                "handled by the stationary shortcut upstream");
  if (!(n > 0.0)) throw Error("mehler: regularization index n must be positive");
  Mixture m;
  m.dim = f0.dimension();
  m.rho = p.rho;
  const double lambda = std::sqrt(-std::expm1(-2.0 * n));  // sqrt(1 - e^{-2n})
  m.s2 = std::exp(-2.0 * n) * p.temperature;
  m.centers.reserve(f0.size());
  m.weights.reserve(f0.size());
  for (std::size_t j = 0; j < f0.size(); ++j) {
    if (f0.weight(j) == 0.0) continue;
    VecView vj = f0.velocity(j);
    Vec c(vj.size());
    for (std::size_t k = 0; k < vj.size(); ++k)
      c[k] = p.v0[k] + lambda * (vj[k] - p.v0[k]);
    m.centers.push_back(std::move(c));
    m.weights.push_back(f0.weight(j));
  }
  return m;
}

double gaussian_density(const Mixture& m, VecView v) {
  const double norm_const =
      std::pow(2.0 * std::numbers::pi * m.s2, -0.5 * static_cast<double>(m.dim));
  double acc = 0.0;
  for (std::size_t j = 0; j < m.centers.size(); ++j)
    acc += m.weights[j] * norm_const * std::exp(-0.5 * dist2(v, m.centers[j]) / m.s2);
  return acc;
}

}  // namespace

MehlerParams mehler_params(const DiscreteMeasure& f0) {
  const ConservedTriple t = conserved_triple(f0);
  if (!(t.mass > 0.0)) throw Error("mehler_params: source must have positive mass");
  MehlerParams p;
  p.rho = t.mass;
  p.v0 = (1.0 / t.mass) * VecView(t.momentum);
  // T = (1/(N rho)) ∫ |v - v0|² dF0 = (energy/rho - |v0|²)/N
  const double centered = t.energy / t.mass - norm2(p.v0);
  p.temperature = std::max(0.0, centered / static_cast<double>(f0.dimension()));
  p.degenerate = f0.is_dirac() || p.temperature == 0.0;
  if (p.degenerate) p.temperature = f0.is_dirac() ? 0.0 : p.temperature;
  return p;
}

double mehler_density(const DiscreteMeasure& f0, double n, VecView v) {
  const MehlerParams p = mehler_params(f0);
  const Mixture m = build_mixture(f0, n, p);
  return gaussian_density(m, v);
}

DiscreteMeasure mehler_sample(const DiscreteMeasure& f0, double n, std::size_t count,
                              std::uint64_t seed) {
  if (count == 0) throw Error("mehler_sample: count must be >= 1");
  const MehlerParams p = mehler_params(f0);
  const Mixture m = build_mixture(f0, n, p);
  // Cumulative weights for the categorical pick.
  std::vector<double> cdf(m.weights.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    acc += m.weights[j];
    cdf[j] = acc;
  }
  const double total = acc;
  RngStream rng = RngStream(seed).substream(0x6D65686CULL);  // sampler substream
  const double sigma = std::sqrt(m.s2);
  const std::size_t d = static_cast<std::size_t>(m.dim);
  DiscreteMeasure out(m.dim);
  out.reserve(count);
  Vec v(d);
  const double w_each = p.rho / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * total;
    const std::size_t j = static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const Vec& c = m.centers[std::min(j, cdf.size() - 1)];
    for (std::size_t k = 0; k < d; ++k) v[k] = c[k] + sigma * rng.normal();
    out.add_atom(v, w_each);
  }
  return out;
}

ConservedTriple mehler_moments(const DiscreteMeasure& f0, double n) {
  const MehlerParams p = mehler_params(f0);
  const Mixture m = build_mixture(f0, n, p);
  ConservedTriple out;
  out.momentum.assign(static_cast<std::size_t>(m.dim), 0.0);
  for (std::size_t j = 0; j < m.centers.size(); ++j) {
    out.mass += m.weights[j];
    for (std::size_t k = 0; k < out.momentum.size(); ++k)
      out.momentum[k] += m.weights[j] * m.centers[j][k];
    out.energy += m.weights[j] * (norm2(m.centers[j]) + m.dim * m.s2);
  }
  return out;
}

double mehler_integrate(const DiscreteMeasure& f0, double n,
                        const std::function<double(VecView)>& phi, int gh_order) {
  const MehlerParams p = mehler_params(f0);
  const Mixture m = build_mixture(f0, n, p);
  const GaussRule& rule = gauss_hermite_probabilists(gh_order);
  const std::size_t d = static_cast<std::size_t>(m.dim);
  const double sigma = std::sqrt(m.s2);
  const std::size_t nodes = rule.nodes.size();
  double total = 0.0;
  Vec v(d);
  for (std::size_t j = 0; j < m.centers.size(); ++j) {
    const Vec& c = m.centers[j];
    // Tensor product over the d axes.
    std::vector<std::size_t> idx(d, 0);
    double acc = 0.0;
    while (true) {
      double w = 1.0;
      for (std::size_t k = 0; k < d; ++k) {
        w *= rule.weights[idx[k]];
        v[k] = c[k] + sigma * rule.nodes[idx[k]];
      }
      acc += w * phi(v);
      std::size_t k = 0;
      while (k < d && ++idx[k] == nodes) {
        idx[k] = 0;
        ++k;
      }
      if (k == d) break;
    }
    total += m.weights[j] * acc;
  }
  return total;
}

double mehler_weak_defect(const DiscreteMeasure& f0, double n, const TestDictionary& dict,
                          int gh_order) {
  double worst = 0.0;
  for (const TestFunctionEntry& e : dict.entries) {
    if (e.weight_order > 2.0) continue;
    const double smoothed = mehler_integrate(f0, n, e.phi, gh_order);
    const double atomic = integrate(f0, e.phi);
    worst = std::max(worst, std::abs(smoothed - atomic));
  }
  return worst;
}

namespace {

// ∫ N(c, s²I)(v) e^{-|v|²/K} (1 + |v|²) dv in closed form.
double clipped_gaussian_weight_integral(VecView c, double s2, double K, int dim) {
  const double alpha = 0.5 / s2 + 1.0 / K;
  const double c2 = norm2(c);
  Vec mvec(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) mvec[i] = c[i] / (2.0 * s2 * alpha);
  const double m2 = norm2(mvec);
  const double d = static_cast<double>(dim);
  const double logpref = -0.5 * d * std::log(2.0 * std::numbers::pi * s2) +
                         0.5 * d * std::log(std::numbers::pi / alpha) + alpha * m2 -
                         0.5 * c2 / s2;
  return std::exp(logpref) * (1.0 + m2 + 0.5 * d / alpha);
}

}  // namespace

double mehler_truncation_defect(const DiscreteMeasure& f0, double n, double K) {
  if (!(K > 0.0)) throw Error("mehler_truncation_defect: K must be positive");
  const MehlerParams p = mehler_params(f0);
  const Mixture m = build_mixture(f0, n, p);
  const std::size_t d = static_cast<std::size_t>(m.dim);

  // defect(K) = ∫ f ⟨v⟩² - ∫ f e^{-|v|²/K} ⟨v⟩² + ∫ (f - K)^+ e^{-|v|²/K} ⟨v⟩²
  // with the first two terms in closed form.
  double full = 0.0, damped = 0.0;
  for (std::size_t j = 0; j < m.centers.size(); ++j) {
    full += m.weights[j] * (1.0 + norm2(m.centers[j]) + m.dim * m.s2);
    damped += m.weights[j] *
              clipped_gaussian_weight_integral(m.centers[j], m.s2, K, m.dim);
  }

  // Peak correction: (f - K)^+ is supported in balls of radius R* around the
  // centers where rho * G0 * exp(-dmin²/2s²) > K.
  const double g0 = std::pow(2.0 * std::numbers::pi * m.s2, -0.5 * m.dim);
  double peak = 0.0;
  if (m.rho * g0 > K) {
    const double rstar = std::sqrt(2.0 * m.s2 * std::log(m.rho * g0 / K));
    // Merge overlapping center boxes into bounding boxes.
    std::vector<std::pair<Vec, Vec>> boxes;  // (lo, hi)
    for (const Vec& c : m.centers) {
      Vec lo(d), hi(d);
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = c[k] - rstar;
        hi[k] = c[k] + rstar;
      }
      bool mergedflag = false;
      for (auto& bx : boxes) {
        bool overlap = true;
        for (std::size_t k = 0; k < d; ++k)
          if (hi[k] < bx.first[k] || lo[k] > bx.second[k]) {
            overlap = false;
            break;
          }
        if (overlap) {
          for (std::size_t k = 0; k < d; ++k) {
            bx.first[k] = std::min(bx.first[k], lo[k]);
            bx.second[k] = std::max(bx.second[k], hi[k]);
          }
          mergedflag = true;
          break;
        }
      }
      if (!mergedflag) boxes.emplace_back(std::move(lo), std::move(hi));
    }
    auto integrand = [&](VecView v) {
      const double f = gaussian_density(m, v);
      if (f <= K) return 0.0;
      return (f - K) * std::exp(-norm2(v) / K) * bracket2(v);
    };
    // Tensor Gauss panels per box, refined until stable.
    for (const auto& bx : boxes) {
      double prev = 0.0;
      for (int level = 0; level < 5; ++level) {
        const int order = 16 << level;
        const GaussRule& rule = gauss_legendre(order);
        Vec v(d);
        std::vector<std::size_t> idx(d, 0);
        double acc = 0.0;
        while (true) {
          double w = 1.0;
          for (std::size_t k = 0; k < d; ++k) {
            const double half = 0.5 * (bx.second[k] - bx.first[k]);
            const double mid = 0.5 * (bx.second[k] + bx.first[k]);
            v[k] = mid + half * rule.nodes[idx[k]];
            w *= half * rule.weights[idx[k]];
          }
          acc += w * integrand(v);
          std::size_t k = 0;
          while (k < d && ++idx[k] == static_cast<std::size_t>(order)) {
            idx[k] = 0;
            ++k;
          }
          if (k == d) break;
        }
        if (level > 0 && std::abs(acc - prev) <=
                             1e-6 * std::max({1e-12, std::abs(acc), std::abs(prev)})) {
          prev = acc;
          break;
        }
        prev = acc;
      }
      peak += prev;
    }
  }
  return full - damped + peak;
}

MehlerTruncation mehler_truncate(const DiscreteMeasure& f0, double n, double search_cap) {
  if (!(n > 0.0)) throw Error("mehler_truncate: n must be positive");
  const MehlerParams p = mehler_params(f0);
  if (p.degenerate) throw Error("mehler_truncate: degenerate source (T = 0)");
  MehlerTruncation out;
  out.threshold = p.rho / (2.0 * n);
  double K = 2.0 * n;  // doubling search from 2n; K > n required
  while (true) {
    const double defect = mehler_truncation_defect(f0, n, K);
    if (defect <= out.threshold) {
      out.K = K;
      out.achieved_defect = defect;
      return out;
    }
    K *= 2.0;
    if (K > search_cap)
      throw Error("mehler_truncate: search cap exceeded before reaching the defect target");
  }
}

}  // namespace boltz
