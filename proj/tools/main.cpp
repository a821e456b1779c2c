// SPDX-License-Identifier: Apache-2.0
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "boltz/error.hpp"
#include "cli_common.hpp"

namespace {

void add_common(CLI::App* cmd, boltz::cli::CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file")->required();
  cmd->add_option("--out", opt.out_dir, "output directory")->required();
  cmd->add_option("--seed", opt.seed_override, "override the config seed");
  cmd->add_option("--threads", opt.threads_override, "override the thread count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure-valued homogeneous Boltzmann toolkit"};
  app.require_subcommand(1);

  boltz::cli::CommonOptions opt;
  int (*runner)(const boltz::cli::CommonOptions&) = nullptr;

  auto* simulate = app.add_subcommand("simulate", "stochastic particle run");
  add_common(simulate, opt);
  simulate->callback([&]() { runner = &boltz::cli::run_simulate; });

  auto* bounds = app.add_subcommand("bounds", "evaluate the quantitative envelopes");
  add_common(bounds, opt);
  bounds->callback([&]() { runner = &boltz::cli::run_bounds; });

  auto* mehler = app.add_subcommand("mehler", "Mehler regularization report");
  add_common(mehler, opt);
  mehler->callback([&]() { runner = &boltz::cli::run_mehler; });

  auto* toolbox = app.add_subcommand("toolbox", "analytical inequality sweep");
  add_common(toolbox, opt);
  toolbox->callback([&]() { runner = &boltz::cli::run_toolbox; });

  auto* stability = app.add_subcommand("stability", "coupled-seed stability experiment");
  add_common(stability, opt);
  stability->callback([&]() { runner = &boltz::cli::run_stability; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Command-line misuse counts as a config error (exit 2); --help stays 0.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return runner(opt);
  } catch (const boltz::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const boltz::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
