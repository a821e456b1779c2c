// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "boltz/bounds.hpp"
#include "boltz/dsmc.hpp"
#include "cli_common.hpp"
#include "parse.hpp"

namespace boltz::cli {

namespace {

// Exact conserved quantities of a source description (before sampling).
ConservedTriple source_conserved(const SimSource& src) {
  if (src.kind == SimSource::Kind::Maxwellian) {
    ConservedTriple t;
    t.mass = src.mass;
    t.momentum = src.mass * VecView(src.mean);
    t.energy = src.mass * (norm2(src.mean) +
                           src.dimension * src.temperature);
    return t;
  }
  return conserved_triple(*src.atoms);
}

}  // namespace

int run_simulate(const CommonOptions& opt) {
  const nlohmann::json cfg_json = load_config(opt.config_path);
  check_keys(cfg_json,
             {"kernel", "source", "particle_count", "dt", "t_end", "seed",
              "record_moments", "record_interval", "majorant_refresh", "threads",
              "envelopes", "stationarity_check", "conservation_tolerance"},
             "simulate");

  if (!cfg_json.contains("kernel") || !cfg_json.contains("source"))
    throw ConfigError("simulate: required keys are kernel, source");

  SimConfig cfg{parse_kernel(cfg_json.at("kernel"))};
  const SimSource source = parse_source(cfg_json.at("source"));
  cfg.particle_count =
      static_cast<std::size_t>(number_or(cfg_json, "particle_count", 1000.0));
  cfg.dt = number_or(cfg_json, "dt", 0.0);
  cfg.t_end = number_or(cfg_json, "t_end", 1.0);
  cfg.seed = static_cast<std::uint64_t>(number_or(cfg_json, "seed", 1.0));
  cfg.record_interval = number_or(cfg_json, "record_interval", 0.1);
  cfg.majorant_refresh = static_cast<int>(number_or(cfg_json, "majorant_refresh", 16.0));
  cfg.threads = static_cast<int>(number_or(cfg_json, "threads", 1.0));
  if (cfg_json.contains("record_moments"))
    cfg.record_moments = cfg_json.at("record_moments").get<std::vector<double>>();
  if (opt.seed_override) cfg.seed = *opt.seed_override;
  if (opt.threads_override) cfg.threads = *opt.threads_override;
  const double conservation_tol = number_or(cfg_json, "conservation_tolerance", 1e-9);

  // Optional envelope column from the production estimate.
  EnvelopeFn envelope_fn;
  nlohmann::json envelope_report;
  if (cfg_json.contains("envelopes")) {
    const nlohmann::json& e = cfg_json.at("envelopes");
    check_keys(e, {"moment_production", "A2"}, "simulate.envelopes");
    if (e.value("moment_production", false)) {
      const ConservedTriple t = source_conserved(source);
      const double mass = t.mass;
      const double e2 = t.mass + t.energy;
      const double a2 = e.contains("A2") ? require_number(e, "A2", "simulate.envelopes")
                                         : constants(cfg.kernel).A2;
      const double gamma = cfg.kernel.gamma();
      envelope_fn = [mass, e2, a2, gamma](double t_eval, double s) {
        if (s < 2.0) return std::numeric_limits<double>::quiet_NaN();
        return moment_production_envelope(mass, e2, a2, gamma, s).evaluate(t_eval);
      };
      envelope_report = {{"kind", "moment_production"}, {"mass", mass},
                         {"e2", e2},                    {"A2", a2}};
    }
  }

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path out(opt.out_dir);

  std::vector<std::string> log_lines;
  const RunResult res = dsmc_run(source, cfg, envelope_fn, [&](const std::string& line) {
    log_lines.push_back(line);
    std::cerr << line << "\n";
  });

  {
    std::stringstream csv;
    write_csv(csv, res.series);
    write_text_file(out / "moments.csv", csv.str());
  }
  write_text_file(out / "state_final.json", to_json(res.state.to_measure()));

  nlohmann::json report;
  report["build"] = build_identifier();
  report["config"] = {
      {"kernel", kernel_to_json_obj(cfg.kernel)},
      {"source", cfg_json.at("source")},
      {"particle_count", cfg.particle_count},
      {"dt", cfg.dt},
      {"t_end", cfg.t_end},
      {"seed", cfg.seed},
      {"record_moments", cfg.record_moments},
      {"record_interval", cfg.record_interval},
      {"majorant_refresh", cfg.majorant_refresh},
      {"threads", cfg.threads},
  };
  if (!envelope_report.is_null()) report["config"]["envelopes"] = envelope_report;

  bool violation = false;
  if (res.dirac_shortcut) {
    report["mode"] = "analytic stationary Dirac";
    report["dirac_stationary"] = true;
  } else {
    report["mode"] = "dsmc";
    report["dirac_stationary"] = false;
    report["conservation"] = {{"momentum_drift", res.momentum_drift},
                              {"energy_drift", res.energy_drift},
                              {"tolerance", conservation_tol}};
    report["counters"] = {{"candidates", res.state.counters.candidates},
                          {"accepted", res.state.counters.accepted}};
    if (res.momentum_drift > conservation_tol || res.energy_drift > conservation_tol)
      violation = true;
  }

  if (cfg_json.contains("stationarity_check") && !res.dirac_shortcut) {
    const nlohmann::json& sc = cfg_json.at("stationarity_check");
    check_keys(sc, {"s", "band_standard_errors"}, "simulate.stationarity_check");
    const double s = require_number(sc, "s", "simulate.stationarity_check");
    const double band = number_or(sc, "band_standard_errors", 4.0);
    // Standard error of the s-moment estimator from the (reproducible)
    // initial ensemble.
    const SimState init = dsmc_init(source, cfg);
    const double mass = init.particle_weight * static_cast<double>(init.count);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < init.count; ++i) {
      const double x = bracket_pow(init.velocity(i), s);
      mean += x;
      m2 += x * x;
    }
    mean /= static_cast<double>(init.count);
    const double var = std::max(0.0, m2 / static_cast<double>(init.count) - mean * mean);
    const double se = mass * std::sqrt(var / static_cast<double>(init.count));
    double first = 0.0, last = 0.0;
    for (const MomentRow& r : res.series.rows) {
      if (r.s != s) continue;
      if (r.t == 0.0) first = r.moment;
      last = r.moment;
    }
    const bool pass = std::abs(last - first) <= band * se;
    report["stationarity"] = {{"s", s},
                              {"initial", first},
                              {"final", last},
                              {"standard_error", se},
                              {"band", band},
                              {"status", pass ? "pass" : "fail"}};
    if (!pass) violation = true;
  }

  report["status"] = violation ? "fail" : "pass";
  write_text_file(out / "run_report.json", report.dump(2) + "\n");
  if (violation) {
    std::cerr << "simulate: invariant violation (see run_report.json)\n";
    return 1;
  }
  return 0;
}

}  // namespace boltz::cli
