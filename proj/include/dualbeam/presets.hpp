// Built-in source presets for the two diodes of the reference dual-color unit,
// with their design power requirements at the fiber tip.

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "dualbeam/solver.hpp"
#include "dualbeam/stack.hpp"

namespace dualbeam {

struct UnitPreset {
  LaserDiodeSpec ld;
  Requirement requirement;
};

// 450 nm PL450B behind an intact TO-can window; 100 uW requirement.
UnitPreset blue_pl450b();

// 638 nm HL63603TG with the can cap removed; 1 mW requirement.
UnitPreset red_hl63603tg();

// Lookup by preset name ("blue-PL450B", "red-HL63603TG").
std::optional<UnitPreset> find_preset(std::string_view name);

std::vector<std::string_view> preset_names();

}  // namespace dualbeam
