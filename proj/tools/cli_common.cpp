// SPDX-License-Identifier: Apache-2.0
#include "cli_common.hpp"

#include <fstream>
#include <sstream>

namespace boltz::cli {

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end())
      throw ConfigError(context + ": unknown key '" + it.key() + "'");
  }
}

double require_number(const nlohmann::json& obj, const std::string& key,
                      const std::string& context) {
  if (!obj.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  if (!obj.at(key).is_number())
    throw ConfigError(context + ": key '" + key + "' must be a number");
  return obj.at(key).get<double>();
}

double number_or(const nlohmann::json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    throw ConfigError("key '" + key + "' must be a number");
  return obj.at(key).get<double>();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvariantError("cannot write output file: " + path.string());
  out << text;
}

std::string build_identifier() {
#ifdef BOLTZ_BUILD_ID
  return BOLTZ_BUILD_ID;
#else
  return "unknown";
#endif
}

}  // namespace boltz::cli
