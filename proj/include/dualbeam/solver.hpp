// Inverse design and tolerance analysis: power-vs-pathway curves, longest
// feasible pathway against a power requirement, corner sweeps over parameter
// bounds, and Monte Carlo over the datasheet ranges.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualbeam/coupling.hpp"
#include "dualbeam/stack.hpp"

namespace dualbeam {

struct Requirement {
  std::string label;
  double min_power_w;
};

enum class LevelChoice { min, nominal, max };

double pick(const Triple& t, LevelChoice c);

struct StackParams {
  double glue_index = 1.54;
  double glass_index = 1.5;
  double window_thickness_m = 0.25e-3;
};

struct Scenario {
  LevelChoice divergence_axis1 = LevelChoice::nominal;
  LevelChoice divergence_axis2 = LevelChoice::nominal;
  Alignment offset;
  FiberSpec fiber;
  StackParams stack;
  double rel_tol = 1e-6;
};

struct CurvePoint {
  double pathway_m;
  double coupled_power_w;
};

class NoFeasibleDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coupled power at a single pathway under the scenario.
double coupled_power_at(const LaserDiodeSpec& ld, const Scenario& scenario,
                        double pathway_m);

/// Coupled power across [range.first, range.second], ascending, `steps`
/// points inclusive of both ends.
std::vector<CurvePoint> power_vs_pathway(const LaserDiodeSpec& ld,
                                         const Scenario& scenario,
                                         std::pair<double, double> pathway_range,
                                         int steps, int jobs = 1);

inline constexpr double kMaxSearchPathway = 100e-3;

struct MaxPathwayResult {
  // Empty when the requirement is still met at 100 mm (">100 mm" sentinel).
  std::optional<double> pathway_m;
  double coupled_power_w = 0.0;  // at the returned pathway (or at 100 mm)
};

/// Longest pathway whose coupled power still meets the requirement, by
/// bisection on the monotone region. Throws NoFeasibleDesign when the
/// requirement already fails at the mechanical minimum pathway.
MaxPathwayResult max_pathway(const LaserDiodeSpec& ld, const Scenario& scenario,
                             const Requirement& req);

struct CornerSample {
  LevelChoice div1;
  LevelChoice div2;
  double dx_m;
  double dy_m;
  double coupled_power_w;
};

struct RequirementMargin {
  Requirement requirement;
  double worst_margin_w;  // worst-corner power minus the requirement
  bool pass;
};

struct SweepReport {
  double pathway_m = 0.0;
  std::vector<CornerSample> corners;  // all 81 combinations
  double worst_power_w = 0.0;
  double best_power_w = 0.0;
  std::vector<RequirementMargin> margins;
};

/// All combinations of {min, nominal, max} divergence per axis and
/// {0, nominal, max} offset per axis (3^2 * 3^2 = 81 corners).
SweepReport corner_sweep(const LaserDiodeSpec& ld, double pathway_m,
                         const FiberSpec& fiber,
                         const std::vector<Requirement>& reqs = {},
                         const StackParams& stack = {}, double rel_tol = 1e-6,
                         int jobs = 1);

struct MonteCarloSample {
  double theta1_rad;
  double theta2_rad;
  double dx_m;
  double dy_m;
  double coupled_power_w;
};

struct RequirementPass {
  Requirement requirement;
  double pass_probability;
};

struct MonteCarloReport {
  int n = 0;
  std::uint64_t seed = 0;
  double pathway_m = 0.0;
  std::vector<MonteCarloSample> samples;  // ordered by draw index
  double p5_w = 0.0, p50_w = 0.0, p95_w = 0.0;
  double min_w = 0.0, max_w = 0.0;
  std::vector<RequirementPass> pass;
};

/// Uniform draws of divergences within [min, max] per axis and offsets within
/// [-max, +max] per axis. Draw k's stream derives from (seed, k), so reports
/// are bitwise reproducible for any `jobs`.
MonteCarloReport tolerance_monte_carlo(const LaserDiodeSpec& ld,
                                       double pathway_m, const FiberSpec& fiber,
                                       int n, std::uint64_t seed,
                                       const std::vector<Requirement>& reqs = {},
                                       const StackParams& stack = {},
                                       double rel_tol = 1e-6, int jobs = 1);

/// Linear-interpolation percentile of an unsorted sample set, p in [0, 100].
double percentile(std::vector<double> values, double p);

}  // namespace dualbeam
