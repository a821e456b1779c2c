// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>

#include "boltz/error.hpp"
#include "boltz/mehler.hpp"
#include "cli_common.hpp"
#include "parse.hpp"

namespace boltz::cli {

int run_mehler(const CommonOptions& opt) {
  const nlohmann::json cfg = load_config(opt.config_path);
  check_keys(cfg, {"measure", "n_values", "sample_count", "seed", "truncation_search",
                   "search_cap"},
             "mehler");
  if (!cfg.contains("measure")) throw ConfigError("mehler: required key 'measure'");
  const DiscreteMeasure f0 = parse_measure(cfg.at("measure"), "mehler.measure");

  std::vector<double> n_values{1.0, 2.0, 4.0, 8.0};
  if (cfg.contains("n_values")) n_values = cfg.at("n_values").get<std::vector<double>>();
  const std::size_t sample_count =
      static_cast<std::size_t>(number_or(cfg, "sample_count", 0.0));
  std::uint64_t seed = static_cast<std::uint64_t>(number_or(cfg, "seed", 1.0));
  if (opt.seed_override) seed = *opt.seed_override;
  const bool do_truncation = cfg.value("truncation_search", false);
  const double search_cap = number_or(cfg, "search_cap", 1048576.0);

  MehlerParams params;
  try {
    params = mehler_params(f0);
  } catch (const Error& e) {
    throw ConfigError(std::string("mehler: ") + e.what());
  }
  if (params.degenerate)
    throw ConfigError("mehler: source is a Dirac (T = 0); the transform is undefined");

  const ConservedTriple src = conserved_triple(f0);
  const TestDictionary dict = TestDictionary::standard(f0.dimension());

  nlohmann::json report;
  report["build"] = build_identifier();
  report["config"] = {{"measure", measure_to_json_obj(f0)},
                      {"n_values", n_values},
                      {"sample_count", sample_count},
                      {"seed", seed}};
  report["rho"] = params.rho;
  report["v0"] = params.v0;
  report["T"] = params.temperature;
  report["runs"] = nlohmann::json::array();

  bool violation = false;
  double prev_defect = std::numeric_limits<double>::infinity();
  for (double n : n_values) {
    nlohmann::json entry;
    entry["n"] = n;

    const ConservedTriple smoothed = mehler_moments(f0, n);
    const double mass_defect = std::abs(smoothed.mass - src.mass);
    Vec dm = smoothed.momentum - src.momentum;
    const double momentum_defect = norm(dm);
    const double energy_defect = std::abs(smoothed.energy - src.energy);
    entry["moment_defects"] = {{"mass", mass_defect},
                               {"momentum", momentum_defect},
                               {"energy", energy_defect}};
    const double scale = std::max(1.0, src.mass + src.energy);
    if (mass_defect > 1e-12 * scale || momentum_defect > 1e-12 * scale ||
        energy_defect > 1e-12 * scale)
      violation = true;

    nlohmann::json defects = nlohmann::json::array();
    double worst = 0.0;
    for (const TestFunctionEntry& e : dict.entries) {
      if (e.weight_order > 2.0) continue;
      const double value =
          std::abs(mehler_integrate(f0, n, e.phi) - integrate(f0, e.phi));
      defects.push_back({{"phi", e.name}, {"value", value}});
      worst = std::max(worst, value);
    }
    entry["weak_defects"] = defects;
    entry["weak_defect_max"] = worst;
    entry["weak_defect_decreasing"] = worst <= prev_defect;
    prev_defect = worst;

    if (sample_count > 0) {
      const DiscreteMeasure sample = mehler_sample(f0, n, sample_count, seed);
      entry["sample"] = {{"count", sample_count},
                         {"mass", moment_norm(sample, 0.0)},
                         {"energy", conserved_triple(sample).energy}};
    }
    if (do_truncation) {
      const MehlerTruncation tr = mehler_truncate(f0, n, search_cap);
      entry["truncation"] = {{"K", tr.K},
                             {"achieved_defect", tr.achieved_defect},
                             {"threshold", tr.threshold}};
    }
    report["runs"].push_back(entry);
  }

  report["status"] = violation ? "fail" : "pass";
  std::filesystem::create_directories(opt.out_dir);
  write_text_file(std::filesystem::path(opt.out_dir) / "mehler_report.json",
                  report.dump(2) + "\n");
  return violation ? 1 : 0;
}

}  // namespace boltz::cli
