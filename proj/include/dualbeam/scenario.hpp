// Scenario documents: a JSON description of the source, fiber, stack
// overrides, requirement and sweep settings driving the CLI. The schema is
// strict — unknown keys are rejected. Surface units are mm/mW/deg/um;
// everything is converted to SI at this boundary.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dualbeam/presets.hpp"
#include "dualbeam/solver.hpp"

namespace dualbeam {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolvedScenario {
  LaserDiodeSpec ld = blue_pl450b().ld;
  Requirement requirement = blue_pl450b().requirement;
  Scenario scenario;
  std::uint64_t seed = 0;
  int montecarlo_n = 1000;
  std::optional<double> pathway_m;
  std::optional<std::pair<double, double>> curve_range_m;
  int curve_steps = 50;
};

/// Parse and validate a scenario document. Unknown keys, malformed values and
/// unsatisfiable bounds all raise SchemaError.
ResolvedScenario resolve_scenario(const nlohmann::json& doc);

/// Full resolved scenario in surface units, embedded in every JSON report.
nlohmann::json scenario_to_json(const ResolvedScenario& rs);

/// Element-by-element stack description for report provenance.
nlohmann::json stack_to_json(const OpticalStack& stack);

}  // namespace dualbeam
