// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "boltz/kernel.hpp"
#include "boltz/measure.hpp"
#include "boltz/mehler.hpp"
#include "boltz/rng.hpp"
#include "boltz/vec.hpp"

namespace boltz {

/// Initial data for a run: an atomic measure (resampled to equal weights),
/// a Mehler-regularized measure, or a Maxwellian.
struct SimSource {
  enum class Kind { Atoms, Mehler, Maxwellian };
  Kind kind = Kind::Atoms;
  std::optional<DiscreteMeasure> atoms;  // Atoms / Mehler
  double mehler_n = 1.0;
  int dimension = 3;  // Maxwellian
  double mass = 1.0;
  Vec mean;
  double temperature = 1.0;

  static SimSource from_atoms(DiscreteMeasure m);
  static SimSource from_mehler(DiscreteMeasure m, double n);
  static SimSource maxwellian(int dimension, double mass, Vec mean, double temperature);

  int dim() const;
  double total_mass() const;
  /// Atomic Dirac sources short-circuit to the stationary solution.
  bool is_dirac() const;
};

struct SimConfig {
  KernelSpec kernel;
  std::size_t particle_count = 2;
  double dt = 0.0;  // 0 -> auto (expected candidates per step <= count/10)
  double t_end = 0.0;
  std::uint64_t seed = 1;
  std::vector<double> record_moments = {2.0};
  double record_interval = 0.1;
  int majorant_refresh = 16;  // steps between majorant rebuilds
  int threads = 1;
};

struct Counters {
  std::uint64_t candidates = 0;
  std::uint64_t accepted = 0;
};

/// Equal-weight particle ensemble plus clock, counters and the RNG labels
/// needed to reproduce the stream. One logical owner per run.
struct SimState {
  int dimension = 3;
  std::size_t count = 0;
  std::vector<double> velocities;  // flat, stride = dimension
  double particle_weight = 0.0;    // mass / count, exact
  double time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step_index = 0;
  Counters counters;
  // Majorant bookkeeping: kinetic factor bound over pairs (2 v_max diameter).
  double majorant_kinetic = -1.0;
  int steps_since_refresh = 0;

  std::span<double> velocity(std::size_t i) {
    return {velocities.data() + i * static_cast<std::size_t>(dimension),
            static_cast<std::size_t>(dimension)};
  }
  VecView velocity(std::size_t i) const {
    return {velocities.data() + i * static_cast<std::size_t>(dimension),
            static_cast<std::size_t>(dimension)};
  }

  double max_speed() const;
  double moment(double s) const;  // ‖F_t‖_s
  ConservedTriple conserved() const;
  double exponential_moment_value(double a, double gamma, double cap = 700.0) const;
  DiscreteMeasure to_measure() const;
};

/// Angular direction sampler: theta from b(cos θ) sin^{N-2}θ via an
/// inverse-CDF table (default 4096 nodes), azimuth uniform on S^{N-2}(n).
/// Requires A0 finite; building the table fails otherwise.
class SigmaSampler {
 public:
  explicit SigmaSampler(const KernelSpec& spec, int table_size = 4096);
  double sample_theta(RngStream& rng) const;
  /// sigma = cos(theta) n + sin(theta) omega into `out`.
  void sample(VecView n_dir, RngStream& rng, std::span<double> out) const;
  int dimension() const { return dim_; }

 private:
  int dim_;
  std::vector<double> inv_cdf_;  // theta quantiles at u = k / (size-1)
};

SimState dsmc_init(const SimSource& source, const SimConfig& config);

/// Advances the state to target_time with automatic sub-stepping, majorant
/// refreshes and stale-majorant retries. dt_hint = 0 means auto.
void dsmc_advance(SimState& state, double target_time, const KernelSpec& spec,
                  const SigmaSampler& sampler, const SimConfig& config);

struct MomentRow {
  double t = 0.0;
  double s = 0.0;
  double moment = 0.0;
  std::optional<double> envelope;
};

struct MomentSeries {
  std::vector<MomentRow> rows;
};

// CSV with header "t,s,moment,envelope"; missing envelopes are empty fields.
void write_csv(std::ostream& os, const MomentSeries& series);

using EnvelopeFn = std::function<double(double t, double s)>;
using LogFn = std::function<void(const std::string&)>;

struct RunResult {
  MomentSeries series;
  SimState state;
  bool dirac_shortcut = false;
  ConservedTriple initial;
  double momentum_drift = 0.0;  // relative to sqrt(mass * energy) scale
  double energy_drift = 0.0;    // relative
};

RunResult dsmc_run(const SimSource& source, const SimConfig& config,
                   const EnvelopeFn& envelope = {}, const LogFn& log = {});

}  // namespace boltz
