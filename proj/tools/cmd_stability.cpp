// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <optional>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "boltz/bounds.hpp"
#include "boltz/dsmc.hpp"
#include "cli_common.hpp"
#include "parse.hpp"

namespace boltz::cli {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

int run_stability(const CommonOptions& opt) {
  const nlohmann::json cfg_json = load_config(opt.config_path);
  check_keys(cfg_json,
             {"kernel", "measure", "perturbation", "particle_count", "tau", "t_end",
              "seed", "record_interval", "envelope_A2", "threads"},
             "stability");
  if (!cfg_json.contains("kernel") || !cfg_json.contains("measure"))
    throw ConfigError("stability: required keys are kernel, measure");

  SimConfig cfg{parse_kernel(cfg_json.at("kernel"))};
  const DiscreteMeasure f0 = parse_measure(cfg_json.at("measure"), "stability.measure");
  const double perturbation = number_or(cfg_json, "perturbation", 0.01);
  cfg.particle_count =
      static_cast<std::size_t>(number_or(cfg_json, "particle_count", 10000.0));
  const double tau = number_or(cfg_json, "tau", 1.0);
  cfg.t_end = number_or(cfg_json, "t_end", 2.0);
  cfg.seed = static_cast<std::uint64_t>(number_or(cfg_json, "seed", 1.0));
  cfg.record_interval = number_or(cfg_json, "record_interval", 0.05);
  cfg.threads = static_cast<int>(number_or(cfg_json, "threads", 1.0));
  if (opt.seed_override) cfg.seed = *opt.seed_override;
  if (opt.threads_override) cfg.threads = *opt.threads_override;
  if (!(tau > 0.0) || !(cfg.t_end > tau))
    throw ConfigError("stability: need 0 < tau < t_end");
  const double grid_pos = tau / cfg.record_interval;
  if (std::abs(grid_pos - std::round(grid_pos)) > 1e-9)
    throw ConfigError("stability: tau must lie on the record grid");

  // G0: velocities scaled by (1 + perturbation), same weights.
  DiscreteMeasure g0(f0.dimension());
  for (std::size_t i = 0; i < f0.size(); ++i) {
    Vec v = (1.0 + perturbation) * f0.velocity(i);
    g0.add_atom(v, f0.weight(i));
  }

  const KernelConstants kc = constants(cfg.kernel);
  const ConservedTriple t0 = conserved_triple(f0);
  const double mass = t0.mass;
  const double e2 = t0.mass + t0.energy;
  const double a2_env = number_or(cfg_json, "envelope_A2", kc.A2);
  const double gamma = cfg.kernel.gamma();
  const double k2g =
      moment_production_envelope(mass, e2, a2_env, gamma, 2.0 + gamma).constants.at("K_s");
  const double c_tau = stability_tau_constant(kc.A0, k2g, e2, tau);

  // Coupled-seed pair of runs, advanced in lockstep.
  SimState fs = dsmc_init(SimSource::from_atoms(f0), cfg);
  SimState gs = dsmc_init(SimSource::from_atoms(g0), cfg);
  const SigmaSampler sampler(cfg.kernel);
  const TestDictionary dict = TestDictionary::standard(f0.dimension());

  std::stringstream csv;
  csv << "t,distance,envelope\n";
  std::optional<double> dist_tau;
  bool violation = false;
  nlohmann::json rows = nlohmann::json::array();
  const int steps = static_cast<int>(std::round(cfg.t_end / cfg.record_interval));
  for (int k = 0; k <= steps; ++k) {
    const double t = std::min(cfg.record_interval * static_cast<double>(k), cfg.t_end);
    if (t > 0.0) {
      dsmc_advance(fs, t, cfg.kernel, sampler, cfg);
      dsmc_advance(gs, t, cfg.kernel, sampler, cfg);
    }
    if (t + 1e-12 < tau) continue;
    const DiscreteMeasure fm = fs.to_measure();
    const DiscreteMeasure gm = gs.to_measure();
    const double d = dictionary_distance(fm, gm, dict);
    if (!dist_tau) dist_tau = moment_norm(difference(fm, gm), 2.0);
    const double envelope = *dist_tau * std::exp(c_tau * (t - tau));
    csv << g17(t) << "," << g17(d) << "," << g17(envelope) << "\n";
    rows.push_back({{"t", t}, {"distance", d}, {"envelope", envelope}});
    if (d > envelope) violation = true;
  }

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path out(opt.out_dir);
  write_text_file(out / "stability.csv", csv.str());

  nlohmann::json report;
  report["build"] = build_identifier();
  report["config"] = {{"kernel", kernel_to_json_obj(cfg.kernel)},
                      {"measure", measure_to_json_obj(f0)},
                      {"perturbation", perturbation},
                      {"particle_count", cfg.particle_count},
                      {"tau", tau},
                      {"t_end", cfg.t_end},
                      {"seed", cfg.seed},
                      {"record_interval", cfg.record_interval},
                      {"envelope_A2", a2_env}};
  report["c_tau"] = c_tau;
  report["K_2_plus_gamma"] = k2g;
  report["distance_at_tau_tv2"] = dist_tau.value_or(0.0);
  report["rows"] = rows;
  report["status"] = violation ? "fail" : "pass";
  write_text_file(out / "stability_report.json", report.dump(2) + "\n");

  if (violation) {
    std::cerr << "stability: envelope violated (see stability_report.json)\n";
    return 1;
  }
  return 0;
}

}  // namespace boltz::cli
