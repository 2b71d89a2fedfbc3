#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "maglev/scenario.hpp"

namespace maglev::harness {

// Named experiment definitions. Every preset starts from the default
// initial state (0.015 m, 0 m/s, 0.35 A).
const std::vector<Scenario>& presets();

// Throws ScenarioError for an unknown name.
Scenario preset(std::string_view name);

std::vector<std::string> preset_names();

}  // namespace maglev::harness
