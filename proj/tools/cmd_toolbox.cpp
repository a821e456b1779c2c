// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <iostream>

#include "boltz/toolbox.hpp"
#include "cli_common.hpp"

namespace boltz::cli {

int run_toolbox(const CommonOptions& opt) {
  const nlohmann::json cfg = load_config(opt.config_path);
  check_keys(cfg, {"seed", "sandwich_samples", "a_values", "lambda_values"}, "toolbox");
  ToolboxConfig tc;
  tc.seed = static_cast<std::uint64_t>(number_or(cfg, "seed", 7.0));
  if (opt.seed_override) tc.seed = *opt.seed_override;
  tc.sandwich_samples = static_cast<int>(number_or(cfg, "sandwich_samples", 10000.0));
  if (cfg.contains("a_values")) tc.a_values = cfg.at("a_values").get<std::vector<double>>();
  if (cfg.contains("lambda_values"))
    tc.lambda_values = cfg.at("lambda_values").get<std::vector<double>>();

  const std::vector<ToolboxCheck> checks = run_toolbox_sweep(tc);

  nlohmann::json report;
  report["build"] = build_identifier();
  report["config"] = {{"seed", tc.seed},
                      {"sandwich_samples", tc.sandwich_samples},
                      {"a_values", tc.a_values},
                      {"lambda_values", tc.lambda_values}};
  report["checks"] = nlohmann::json::array();
  bool all_pass = true;
  for (const ToolboxCheck& c : checks) {
    nlohmann::json entry{{"name", c.name}, {"pass", c.pass}, {"details", c.details}};
    if (!c.pass) {
      entry["violation"] = c.violation;
      std::cerr << "toolbox FAIL " << c.name << ": " << c.violation << "\n";
      all_pass = false;
    }
    report["checks"].push_back(entry);
  }
  report["status"] = all_pass ? "pass" : "fail";

  std::filesystem::create_directories(opt.out_dir);
  write_text_file(std::filesystem::path(opt.out_dir) / "toolbox_report.json",
                  report.dump(2) + "\n");
  return all_pass ? 0 : 1;
}

}  // namespace boltz::cli
