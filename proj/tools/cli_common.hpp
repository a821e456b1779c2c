// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace boltz::cli {

/// Schema violations and malformed inputs: exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Invariant violations detected while running: exit code 1.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
};

nlohmann::json load_config(const std::string& path);

/// Rejects keys outside `allowed` (strict schemas).
void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& context);

double require_number(const nlohmann::json& obj, const std::string& key,
                      const std::string& context);
double number_or(const nlohmann::json& obj, const std::string& key, double fallback);

void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string build_identifier();

int run_simulate(const CommonOptions& opt);
int run_bounds(const CommonOptions& opt);
int run_mehler(const CommonOptions& opt);
int run_toolbox(const CommonOptions& opt);
int run_stability(const CommonOptions& opt);

}  // namespace boltz::cli
