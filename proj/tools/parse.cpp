// SPDX-License-Identifier: Apache-2.0
#include "boltz/error.hpp"
#include "parse.hpp"

#include <fstream>
#include <sstream>

namespace boltz::cli {

KernelSpec parse_kernel(const nlohmann::json& j) {
  check_keys(j, {"N", "gamma", "angular", "truncation"}, "kernel");
  if (!j.contains("N") || !j.contains("gamma") || !j.contains("angular"))
    throw ConfigError("kernel: required keys are N, gamma, angular");
  const nlohmann::json& a = j.at("angular");
  if (!a.is_object() || !a.contains("kind"))
    throw ConfigError("kernel.angular: expected an object with a 'kind'");
  const std::string kind = a.at("kind").get<std::string>();
  if (kind == "constant")
    check_keys(a, {"kind", "value"}, "kernel.angular");
  else if (kind == "inverse_power")
    check_keys(a, {"kind", "s", "cprime"}, "kernel.angular");
  else if (kind == "table")
    check_keys(a, {"kind", "theta", "values", "singularity_exponent"}, "kernel.angular");
  else
    throw ConfigError("kernel.angular: unknown kind '" + kind + "'");
  try {
    return kernel_from_json(j.dump());
  } catch (const Error& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
}

DiscreteMeasure parse_measure(const nlohmann::json& j, const std::string& context) {
  check_keys(j, {"dimension", "atoms"}, context);
  try {
    return measure_from_json(j.dump());
  } catch (const Error& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

SimSource parse_source(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("source: expected an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "atoms") {
    check_keys(j, {"kind", "measure", "measure_file"}, "source");
    if (j.contains("measure")) {
      return SimSource::from_atoms(parse_measure(j.at("measure"), "source.measure"));
    }
    if (j.contains("measure_file")) {
      std::ifstream in(j.at("measure_file").get<std::string>());
      if (!in) throw ConfigError("source.measure_file: cannot open file");
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        return SimSource::from_atoms(measure_from_json(buf.str()));
      } catch (const Error& e) {
        throw ConfigError(std::string("source.measure_file: ") + e.what());
      }
    }
    throw ConfigError("source: atoms sources need 'measure' or 'measure_file'");
  }
  if (kind == "mehler") {
    check_keys(j, {"kind", "measure", "n"}, "source");
    if (!j.contains("measure")) throw ConfigError("source: mehler sources need 'measure'");
    const double n = require_number(j, "n", "source");
    return SimSource::from_mehler(parse_measure(j.at("measure"), "source.measure"), n);
  }
  if (kind == "maxwellian") {
    check_keys(j, {"kind", "dimension", "mass", "mean", "temperature"}, "source");
    const int dim = static_cast<int>(require_number(j, "dimension", "source"));
    const double mass = require_number(j, "mass", "source");
    const double temp = require_number(j, "temperature", "source");
    Vec mean(static_cast<std::size_t>(dim), 0.0);
    if (j.contains("mean")) {
      const auto arr = j.at("mean").get<std::vector<double>>();
      if (static_cast<int>(arr.size()) != dim)
        throw ConfigError("source.mean: length must equal the dimension");
      mean = arr;
    }
    if (!(mass > 0.0)) throw ConfigError("source.mass must be positive");
    if (!(temp > 0.0)) throw ConfigError("source.temperature must be positive");
    return SimSource::maxwellian(dim, mass, std::move(mean), temp);
  }
  throw ConfigError("source: unknown kind '" + kind + "'");
}

nlohmann::json kernel_to_json_obj(const KernelSpec& spec) {
  return nlohmann::json::parse(to_json(spec));
}

nlohmann::json measure_to_json_obj(const DiscreteMeasure& m) {
  return nlohmann::json::parse(to_json(m));
}

}  // namespace boltz::cli
