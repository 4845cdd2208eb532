#include "dualbeam/presets.hpp"

#include <cmath>

namespace dualbeam {

namespace {
constexpr double kDeg = M_PI / 180.0;
}

UnitPreset blue_pl450b() {
  LaserDiodeSpec ld{
      "blue-PL450B",
      450e-9,
      88e-3,
      Triple(4.0 * kDeg, 7.5 * kDeg, 11.0 * kDeg),
      Triple(18.0 * kDeg, 21.5 * kDeg, 25.0 * kDeg),
      Triple(5e-6, 10e-6, 15e-6),
      /*can_window=*/true,
      2.90e-3,
  };
  return UnitPreset{ld, Requirement{"450nm-at-tip", 100e-6}};
}

UnitPreset red_hl63603tg() {
  LaserDiodeSpec ld{
      "red-HL63603TG",
      638e-9,
      45e-3,
      Triple(5.0 * kDeg, 8.5 * kDeg, 13.0 * kDeg),
      Triple(13.0 * kDeg, 18.0 * kDeg, 23.0 * kDeg),
      Triple(5e-6, 10e-6, 15e-6),
      /*can_window=*/false,
      0.46e-3,
  };
  return UnitPreset{ld, Requirement{"638nm-at-tip", 1e-3}};
}

std::optional<UnitPreset> find_preset(std::string_view name) {
  if (name == "blue-PL450B") return blue_pl450b();
  if (name == "red-HL63603TG") return red_hl63603tg();
  return std::nullopt;
}

std::vector<std::string_view> preset_names() {
  return {"blue-PL450B", "red-HL63603TG"};
}

}  // namespace dualbeam
