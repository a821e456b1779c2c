// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "boltz/bounds.hpp"
#include "boltz/error.hpp"
#include "cli_common.hpp"

namespace boltz::cli {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

int run_bounds(const CommonOptions& opt) {
  const nlohmann::json cfg = load_config(opt.config_path);
  check_keys(cfg,
             {"mass", "energy_norm", "A0", "A2", "gamma", "s_values", "s0", "tau",
              "time_grid", "ode_comparison"},
             "bounds");
  const double mass = require_number(cfg, "mass", "bounds");
  const double e2 = require_number(cfg, "energy_norm", "bounds");
  const double a2 = require_number(cfg, "A2", "bounds");
  const double a0 = number_or(cfg, "A0", 1.0);
  const double gamma = require_number(cfg, "gamma", "bounds");
  const double s0 = number_or(cfg, "s0", 8.0);
  const double tau = number_or(cfg, "tau", 1.0);

  std::vector<double> s_values{3.0, 4.0, 6.0};
  if (cfg.contains("s_values")) s_values = cfg.at("s_values").get<std::vector<double>>();

  double t_start = 0.05, t_stop = 5.0;
  int t_count = 100;
  if (cfg.contains("time_grid")) {
    const nlohmann::json& g = cfg.at("time_grid");
    check_keys(g, {"start", "stop", "count"}, "bounds.time_grid");
    t_start = require_number(g, "start", "bounds.time_grid");
    t_stop = require_number(g, "stop", "bounds.time_grid");
    t_count = static_cast<int>(number_or(g, "count", 100.0));
    if (!(t_start > 0.0) || !(t_stop > t_start) || t_count < 2)
      throw ConfigError("bounds.time_grid: need 0 < start < stop and count >= 2");
  }

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path out(opt.out_dir);

  std::stringstream csv;
  csv << "t,envelope_kind,s_or_q,value\n";
  nlohmann::json report;
  report["build"] = build_identifier();
  report["config"] = {{"mass", mass},     {"energy_norm", e2}, {"A0", a0},
                      {"A2", a2},         {"gamma", gamma},    {"s_values", s_values},
                      {"s0", s0},         {"tau", tau},
                      {"time_grid", {{"start", t_start}, {"stop", t_stop}, {"count", t_count}}}};
  report["constants"] = nlohmann::json::object();

  std::vector<BoundEnvelope> envelopes;
  for (double s : s_values) {
    try {
      envelopes.push_back(moment_production_envelope(mass, e2, a2, gamma, s));
    } catch (const Error& e) {
      throw ConfigError(std::string("bounds: ") + e.what());
    }
    report["constants"]["K_" + g17(s)] = envelopes.back().constants.at("K_s");
  }
  BoundEnvelope exp_env = exponential_envelope(mass, e2, a2, gamma, s0);
  report["constants"]["beta"] = exp_env.constants.at("beta");
  report["constants"]["alpha_inf"] = exp_env.constants.at("alpha_inf");
  const double k2g = moment_production_envelope(mass, e2, a2, gamma, 2.0 + gamma)
                         .constants.at("K_s");
  const double c_tau = stability_tau_constant(a0, k2g, e2, tau);
  report["constants"]["K_2_plus_gamma"] = k2g;
  report["constants"]["c_tau"] = c_tau;
  report["constants"]["tau"] = tau;

  std::optional<BoundEnvelope> ode;
  if (cfg.contains("ode_comparison")) {
    const nlohmann::json& o = cfg.at("ode_comparison");
    check_keys(o, {"A", "B", "eps"}, "bounds.ode_comparison");
    ode = ode_comparison_envelope(require_number(o, "A", "bounds.ode_comparison"),
                                  require_number(o, "B", "bounds.ode_comparison"),
                                  require_number(o, "eps", "bounds.ode_comparison"));
    report["constants"]["Y_limit"] = ode->constants.at("limit");
  }

  for (int k = 0; k < t_count; ++k) {
    const double t =
        t_start + (t_stop - t_start) * static_cast<double>(k) / (t_count - 1.0);
    for (std::size_t i = 0; i < envelopes.size(); ++i) {
      csv << g17(t) << ",moment_production," << g17(s_values[i]) << ","
          << g17(envelopes[i].evaluate(t)) << "\n";
    }
    csv << g17(t) << ",exponential," << g17(s0) << "," << g17(exp_env.evaluate(t))
        << "\n";
    if (t >= tau)
      csv << g17(t) << ",stability_tau," << g17(tau) << ","
          << g17(std::exp(c_tau * (t - tau))) << "\n";
    if (ode)
      csv << g17(t) << ",ode_comparison," << g17(ode->constants.at("eps")) << ","
          << g17(ode->evaluate(t)) << "\n";
  }

  write_text_file(out / "envelopes.csv", csv.str());
  write_text_file(out / "bounds_report.json", report.dump(2) + "\n");
  return 0;
}

}  // namespace boltz::cli
