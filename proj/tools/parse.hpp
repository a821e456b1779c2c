// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include "boltz/dsmc.hpp"
#include "boltz/kernel.hpp"
#include "boltz/measure.hpp"
#include "cli_common.hpp"

namespace boltz::cli {

KernelSpec parse_kernel(const nlohmann::json& j);
DiscreteMeasure parse_measure(const nlohmann::json& j, const std::string& context);
SimSource parse_source(const nlohmann::json& j);

/// Serialized forms used to echo the resolved config into reports.
nlohmann::json kernel_to_json_obj(const KernelSpec& spec);
nlohmann::json measure_to_json_obj(const DiscreteMeasure& m);

}  // namespace boltz::cli
