// SPDX-License-Identifier: Apache-2.0
//
// Scenario documents are JSON objects whose keys mirror the ScenarioSpec
// fields one-to-one. Unknown keys are errors.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "touchauth/signal_model.hpp"

namespace touchauth {

ScenarioSpec scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioSpec& spec);

ScenarioSpec load_scenario(const std::string& path);
void save_scenario(const std::string& path, const ScenarioSpec& spec);

/// Applies `path=value` overrides to the JSON form before parsing. Paths are
/// dotted, array elements by index (e.g. `bodies.0.amplitude_volts=0.2`).
/// Values are parsed as JSON when possible, otherwise taken as strings.
ScenarioSpec apply_overrides(const ScenarioSpec& spec,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace touchauth
