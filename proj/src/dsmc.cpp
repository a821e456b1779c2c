// SPDX-License-Identifier: Apache-2.0
#include "boltz/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <thread>

#include "boltz/collision.hpp"
#include "boltz/error.hpp"
#include "boltz/quadrature.hpp"
#include "boltz/special_functions.hpp"

namespace boltz {

namespace {
constexpr double kPi = std::numbers::pi;
}

SimSource SimSource::from_atoms(DiscreteMeasure m) {
  SimSource s;
  s.kind = Kind::Atoms;
  s.dimension = m.dimension();
  s.atoms = std::move(m);
  return s;
}

SimSource SimSource::from_mehler(DiscreteMeasure m, double n) {
  SimSource s;
  s.kind = Kind::Mehler;
  s.dimension = m.dimension();
  s.atoms = std::move(m);
  s.mehler_n = n;
  return s;
}

SimSource SimSource::maxwellian(int dimension, double mass, Vec mean, double temperature) {
  if (!(temperature > 0.0)) throw Error("SimSource: temperature must be positive");
  SimSource s;
  s.kind = Kind::Maxwellian;
  s.dimension = dimension;
  s.mass = mass;
  s.mean = std::move(mean);
  s.temperature = temperature;
  return s;
}

int SimSource::dim() const { return dimension; }

double SimSource::total_mass() const {
  if (kind == Kind::Maxwellian) return mass;
  return conserved_triple(*atoms).mass;
}

bool SimSource::is_dirac() const {
  // The Dirac case split happens before any regularization, so Mehler
  // sources with a degenerate base measure short-circuit as well.
  return kind != Kind::Maxwellian && atoms->is_dirac();
}

double SimState::max_speed() const {
  double m2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) m2 = std::max(m2, norm2(velocity(i)));
  return std::sqrt(m2);
}

double SimState::moment(double s) const {
  std::vector<double> terms(count);
  for (std::size_t i = 0; i < count; ++i) terms[i] = bracket_pow(velocity(i), s);
  return particle_weight * pairwise_sum(terms);
}

ConservedTriple SimState::conserved() const {
  ConservedTriple out;
  out.momentum.assign(static_cast<std::size_t>(dimension), 0.0);
  std::vector<double> energy_terms(count);
  for (std::size_t i = 0; i < count; ++i) {
    VecView v = velocity(i);
    energy_terms[i] = norm2(v);
    for (std::size_t k = 0; k < v.size(); ++k) out.momentum[k] += v[k];
  }
  out.mass = particle_weight * static_cast<double>(count);
  for (double& m : out.momentum) m *= particle_weight;
  out.energy = particle_weight * pairwise_sum(energy_terms);
  return out;
}

double SimState::exponential_moment_value(double a, double gamma, double cap) const {
  std::vector<double> terms(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double expo = a * bracket_pow(velocity(i), gamma);
    if (expo > cap) throw OverflowError("SimState: exponential moment exponent cap");
    terms[i] = std::exp(expo);
  }
  return particle_weight * pairwise_sum(terms);
}

DiscreteMeasure SimState::to_measure() const {
  DiscreteMeasure out(dimension);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.add_atom(velocity(i), particle_weight);
  return out;
}

SigmaSampler::SigmaSampler(const KernelSpec& spec, int table_size) : dim_(spec.dimension()) {
  if (table_size < 16) throw Error("SigmaSampler: table too small");
  const KernelConstants c = spec.constants_cached();
  if (!std::isfinite(c.A0) || !(c.A0 > 0.0))
    throw Error("SigmaSampler: angular profile not integrable on the sphere "
                "(A0 infinite or zero); truncate the kernel first");
  // Fine CDF grid of ∫ b sin^{N-2}, then equal-probability quantiles.
  const int fine = 1 << 16;
  std::vector<double> cdf(static_cast<std::size_t>(fine) + 1, 0.0);
  const GaussRule& rule = gauss_legendre(4);
  double acc = 0.0;
  for (int p = 0; p < fine; ++p) {
    const double a = kPi * p / fine;
    const double b = kPi * (p + 1) / fine;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double theta = mid + half * rule.nodes[i];
      panel += half * rule.weights[i] * spec.b(theta) *
               std::pow(std::sin(theta), dim_ - 2.0);
    }
    acc += panel;
    cdf[static_cast<std::size_t>(p) + 1] = acc;
  }
  if (!(acc > 0.0) || !std::isfinite(acc))
    throw Error("SigmaSampler: could not normalize the angular density");
  inv_cdf_.resize(static_cast<std::size_t>(table_size) + 1);
  inv_cdf_.front() = 0.0;
  inv_cdf_.back() = kPi;
  std::size_t j = 0;
  for (int k = 1; k < table_size; ++k) {
    const double target = acc * static_cast<double>(k) / table_size;
    while (j + 1 < cdf.size() && cdf[j + 1] < target) ++j;
    // Linear interpolation inside the fine cell.
    const double c0 = cdf[j], c1 = cdf[j + 1];
    const double frac = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
    inv_cdf_[static_cast<std::size_t>(k)] =
        kPi * (static_cast<double>(j) + frac) / fine;
  }
}

double SigmaSampler::sample_theta(RngStream& rng) const {
  const double u = rng.uniform() * (static_cast<double>(inv_cdf_.size()) - 1.0);
  const std::size_t k = std::min(static_cast<std::size_t>(u), inv_cdf_.size() - 2);
  const double frac = u - static_cast<double>(k);
  return inv_cdf_[k] + frac * (inv_cdf_[k + 1] - inv_cdf_[k]);
}

void SigmaSampler::sample(VecView n_dir, RngStream& rng, std::span<double> out) const {
  const double theta = sample_theta(rng);
  const double ct = std::cos(theta), st = std::sin(theta);
  if (dim_ == 2) {
    // omega in {n_perp, -n_perp} with equal probability.
    const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
    out[0] = ct * n_dir[0] + st * sign * (-n_dir[1]);
    out[1] = ct * n_dir[1] + st * sign * (n_dir[0]);
    return;
  }
  // omega uniform on the sphere orthogonal to n: draw a Gaussian vector,
  // remove the n-component, normalize.
  const std::size_t d = static_cast<std::size_t>(dim_);
  Vec g(d);
  double gn = 0.0;
  do {
    for (std::size_t i = 0; i < d; ++i) g[i] = rng.normal();
    const double p = dot(g, n_dir);
    for (std::size_t i = 0; i < d; ++i) g[i] -= p * n_dir[i];
    gn = norm(g);
  } while (gn < 1e-12);
  for (std::size_t i = 0; i < d; ++i) out[i] = ct * n_dir[i] + st * g[i] / gn;
}

namespace {

void refresh_majorant(SimState& st, const KernelSpec& spec) {
  st.majorant_kinetic = spec.kinetic(2.0 * st.max_speed());
  st.steps_since_refresh = 0;
}

struct ChunkResult {
  std::uint64_t candidates = 0;
  std::uint64_t accepted = 0;
  bool stale = false;
};

// Processes pair slots [begin, end); pairs are disjoint so velocity writes
// are race-free. Per-pair substreams keyed by (seed, step, pair index) make
// the result independent of the chunking.
ChunkResult process_pairs(SimState& st, const KernelSpec& spec, const SigmaSampler& sampler,
                          const std::vector<std::uint32_t>& perm, std::uint64_t begin,
                          std::uint64_t end, double majorant_kinetic) {
  ChunkResult res;
  const std::size_t d = static_cast<std::size_t>(st.dimension);
  Vec n_dir(d), sigma(d);
  for (std::uint64_t m = begin; m < end; ++m) {
    const std::size_t ia = perm[2 * m];
    const std::size_t ib = perm[2 * m + 1];
    std::span<double> va = st.velocity(ia);
    std::span<double> vb = st.velocity(ib);
    const double r = dist(VecView(va.data(), d), VecView(vb.data(), d));
    const double kin = spec.kinetic(r);
    double maj = majorant_kinetic;
    if (kin > maj) {
      // Stale majorant: accept at the observed rate and request a rebuild.
      res.stale = true;
      maj = kin;
    }
    ++res.candidates;
    RngStream pair_rng(derive_seed(st.seed, st.step_index + 1, m + 1));
    const double u = pair_rng.uniform();
    if (u * maj >= kin || r == 0.0) continue;
    for (std::size_t k = 0; k < d; ++k) n_dir[k] = (va[k] - vb[k]) / r;
    sampler.sample(n_dir, pair_rng, sigma);
    post_collision_inplace(va, vb, sigma);
    ++res.accepted;
  }
  return res;
}

}  // namespace

SimState dsmc_init(const SimSource& source, const SimConfig& config) {
  if (config.particle_count < 2) throw Error("dsmc_init: particle_count must be >= 2");
  const double mass = source.total_mass();
  if (!(mass > 0.0)) throw Error("dsmc_init: source mass must be positive");

  SimState st;
  st.dimension = source.dim();
  st.count = config.particle_count;
  st.velocities.assign(st.count * static_cast<std::size_t>(st.dimension), 0.0);
  st.particle_weight = mass / static_cast<double>(st.count);
  st.seed = config.seed;

  RngStream init_rng = RngStream(config.seed).substream(0x696E6974ULL);
  const std::size_t d = static_cast<std::size_t>(st.dimension);

  switch (source.kind) {
    case SimSource::Kind::Atoms: {
      const DiscreteMeasure& atoms = *source.atoms;
      if (atoms.empty()) throw Error("dsmc_init: empty source measure");
      bool equal = true;
      for (std::size_t j = 1; j < atoms.size(); ++j)
        if (atoms.weight(j) != atoms.weight(0)) equal = false;
      if (equal && st.count % atoms.size() == 0) {
        // Exact replication, no randomness needed.
        for (std::size_t i = 0; i < st.count; ++i) {
          VecView v = atoms.velocity(i % atoms.size());
          std::copy(v.begin(), v.end(), st.velocity(i).begin());
        }
      } else {
        std::vector<double> cdf(atoms.size());
        double acc = 0.0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          acc += atoms.weight(j);
          cdf[j] = acc;
        }
        for (std::size_t i = 0; i < st.count; ++i) {
          const double u = init_rng.uniform() * acc;
          const std::size_t j = std::min(
              static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) -
                                       cdf.begin()),
              atoms.size() - 1);
          VecView v = atoms.velocity(j);
          std::copy(v.begin(), v.end(), st.velocity(i).begin());
        }
      }
      break;
    }
    case SimSource::Kind::Mehler: {
      const DiscreteMeasure sample = mehler_sample(
          *source.atoms, source.mehler_n, st.count, derive_seed(config.seed, 0x6D65ULL));
      for (std::size_t i = 0; i < st.count; ++i) {
        VecView v = sample.velocity(i);
        std::copy(v.begin(), v.end(), st.velocity(i).begin());
      }
      break;
    }
    case SimSource::Kind::Maxwellian: {
      const double sd = std::sqrt(source.temperature);
      for (std::size_t i = 0; i < st.count; ++i) {
        std::span<double> v = st.velocity(i);
        for (std::size_t k = 0; k < d; ++k) {
          const double mean_k = source.mean.empty() ? 0.0 : source.mean[k];
          v[k] = mean_k + sd * init_rng.normal();
        }
      }
      break;
    }
  }
  return st;
}

void dsmc_advance(SimState& st, double target_time, const KernelSpec& spec,
                  const SigmaSampler& sampler, const SimConfig& config) {
  const KernelConstants kc = spec.constants_cached();
  if (!std::isfinite(kc.A0))
    throw Error("dsmc_advance: A0 infinite; non-cutoff kernels must be truncated");
  const double A0 = kc.A0;
  const double mass = st.particle_weight * static_cast<double>(st.count);
  const std::uint64_t max_pairs = st.count / 2;
  std::vector<std::uint32_t> perm(st.count);
  for (std::size_t i = 0; i < st.count; ++i) perm[i] = static_cast<std::uint32_t>(i);
  RngStream master = RngStream(st.seed).substream(0x73746570ULL);
  // Re-derive the master position for restarts: one substream per step index.
  while (st.time < target_time - 1e-14 * std::max(1.0, target_time)) {
    if (st.majorant_kinetic < 0.0 || st.steps_since_refresh >= config.majorant_refresh)
      refresh_majorant(st, spec);
    const double lambda_hat = A0 * st.majorant_kinetic;  // majorant per spec
    double dt_step = target_time - st.time;
    if (lambda_hat > 0.0) {
      // Expected candidates per step <= count/10 and per-particle majorant
      // rate * dt <= 1.
      const double dt_cap = 0.2 / (mass * lambda_hat);
      const double dt_user = config.dt > 0.0 ? config.dt : dt_cap;
      dt_step = std::min(dt_step, std::min(dt_user, dt_cap));
    } else if (config.dt > 0.0) {
      dt_step = std::min(dt_step, config.dt);
    }

    RngStream step_rng = master.substream(st.step_index + 1);
    const double mean_candidates =
        0.5 * static_cast<double>(st.count) * mass * lambda_hat * dt_step;
    std::uint64_t n_pairs = step_rng.poisson(mean_candidates);
    if (n_pairs > max_pairs) n_pairs = max_pairs;

    if (n_pairs > 0) {
      // Partial Fisher-Yates: the first 2*n_pairs slots become disjoint pairs.
      for (std::uint64_t k = 0; k < 2 * n_pairs; ++k) {
        const std::uint64_t j =
            k + step_rng.uniform_index(static_cast<std::uint64_t>(st.count) - k);
        std::swap(perm[k], perm[j]);
      }
      const int threads = std::max(1, config.threads);
      bool stale = false;
      if (threads == 1 || n_pairs < 256) {
        ChunkResult r =
            process_pairs(st, spec, sampler, perm, 0, n_pairs, st.majorant_kinetic);
        st.counters.candidates += r.candidates;
        st.counters.accepted += r.accepted;
        stale = r.stale;
      } else {
        std::vector<ChunkResult> results(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int c = 0; c < threads; ++c) {
          const std::uint64_t b = n_pairs * static_cast<std::uint64_t>(c) /
                                  static_cast<std::uint64_t>(threads);
          const std::uint64_t e = n_pairs * (static_cast<std::uint64_t>(c) + 1) /
                                  static_cast<std::uint64_t>(threads);
          pool.emplace_back([&, b, e, c]() {
            results[static_cast<std::size_t>(c)] =
                process_pairs(st, spec, sampler, perm, b, e, st.majorant_kinetic);
          });
        }
        for (std::thread& t : pool) t.join();
        for (const ChunkResult& r : results) {
          st.counters.candidates += r.candidates;
          st.counters.accepted += r.accepted;
          stale = stale || r.stale;
        }
      }
      if (stale) refresh_majorant(st, spec);
    }

    st.time += dt_step;
    ++st.step_index;
    ++st.steps_since_refresh;
  }
  st.time = target_time;
}

namespace {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const MomentSeries& series) {
  os << "t,s,moment,envelope\n";
  for (const MomentRow& r : series.rows) {
    os << format_g17(r.t) << "," << format_g17(r.s) << "," << format_g17(r.moment) << ",";
    if (r.envelope) os << format_g17(*r.envelope);
    os << "\n";
  }
}

RunResult dsmc_run(const SimSource& source, const SimConfig& config,
                   const EnvelopeFn& envelope, const LogFn& log) {
  if (config.t_end < 0.0) throw Error("dsmc_run: t_end must be >= 0");
  if (!(config.record_interval > 0.0)) throw Error("dsmc_run: record_interval must be > 0");

  RunResult out{{}, dsmc_init(source, config), false, {}, 0.0, 0.0};
  SimState& st = out.state;
  out.initial = st.conserved();

  auto record = [&](double t) {
    for (double s : config.record_moments) {
      MomentRow row;
      row.t = t;
      row.s = s;
      row.moment = st.moment(s);
      if (envelope && t > 0.0) {
        const double e = envelope(t, s);
        if (!std::isnan(e)) row.envelope = e;
      }
      out.series.rows.push_back(row);
    }
    if (log) {
      log("t=" + format_g17(t) + " accepted=" + std::to_string(st.counters.accepted) +
          " candidates=" + std::to_string(st.counters.candidates));
    }
  };

  record(0.0);
  if (config.t_end == 0.0) return out;

  if (source.is_dirac()) {
    // Stationary Dirac solution: constant moments, no particle dynamics.
    out.dirac_shortcut = true;
    for (double t = config.record_interval; t < config.t_end + 0.5 * config.record_interval;
         t += config.record_interval) {
      const double tt = std::min(t, config.t_end);
      st.time = tt;
      record(tt);
      if (tt >= config.t_end) break;
    }
    return out;
  }

  const SigmaSampler sampler(config.kernel);
  double t = 0.0;
  std::size_t k = 0;
  while (t < config.t_end - 1e-12) {
    ++k;
    t = std::min(config.record_interval * static_cast<double>(k), config.t_end);
    dsmc_advance(st, t, config.kernel, sampler, config);
    record(t);
  }

  const ConservedTriple fin = st.conserved();
  const double pscale = std::max(std::sqrt(out.initial.mass * out.initial.energy),
                                 norm(out.initial.momentum));
  Vec dp = fin.momentum - out.initial.momentum;
  out.momentum_drift = pscale > 0.0 ? norm(dp) / pscale : norm(dp);
  out.energy_drift = out.initial.energy > 0.0
                         ? std::abs(fin.energy - out.initial.energy) / out.initial.energy
                         : std::abs(fin.energy);
  return out;
}

}  // namespace boltz
