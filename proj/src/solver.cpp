#include "dualbeam/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "dualbeam/rng.hpp"

namespace dualbeam {

namespace {

// Index-addressed parallel loop; results land by index, so output order is
// independent of the thread count.
template <typename Fn>
void parallel_for(int n, int jobs, const Fn& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(jobs, n);
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

AstigmaticBeam source_beam(const LaserDiodeSpec& ld, double theta1,
                           double theta2) {
  return beam_from_spec(ld.vacuum_wavelength_m, ld.power_at_drive_w, theta1,
                        theta2);
}

double evaluate(const LaserDiodeSpec& ld, double theta1, double theta2,
                const Alignment& offset, const FiberSpec& fiber,
                const StackParams& stack, double pathway_m, double rel_tol) {
  const OpticalStack s =
      build_unit_stack(ld, pathway_m, stack.glue_index, stack.glass_index,
                       stack.window_thickness_m);
  const AstigmaticBeam at_face = trace_stack(source_beam(ld, theta1, theta2), s);
  return coupled_power(at_face, fiber, offset, rel_tol, ld.power_at_drive_w)
      .coupled_power_w;
}

}  // namespace

double pick(const Triple& t, LevelChoice c) {
  switch (c) {
    case LevelChoice::min: return t.min;
    case LevelChoice::nominal: return t.nominal;
    case LevelChoice::max: return t.max;
  }
  throw std::logic_error("bad LevelChoice");
}

double coupled_power_at(const LaserDiodeSpec& ld, const Scenario& scenario,
                        double pathway_m) {
  return evaluate(ld, pick(ld.theta_fwhm_1_rad, scenario.divergence_axis1),
                  pick(ld.theta_fwhm_2_rad, scenario.divergence_axis2),
                  scenario.offset, scenario.fiber, scenario.stack, pathway_m,
                  scenario.rel_tol);
}

std::vector<CurvePoint> power_vs_pathway(const LaserDiodeSpec& ld,
                                         const Scenario& scenario,
                                         std::pair<double, double> pathway_range,
                                         int steps, int jobs) {
  if (steps < 2) throw std::domain_error("curve needs at least 2 steps");
  const auto [lo, hi] = pathway_range;
  if (!(lo >= ld.min_pathway_m && hi <= 20e-3 && lo < hi)) {
    throw std::domain_error(
        "pathway range must lie within [min_pathway, 20 mm]");
  }
  std::vector<CurvePoint> curve(steps);
  parallel_for(steps, jobs, [&](int i) {
    const double pathway = lo + (hi - lo) * i / (steps - 1);
    curve[i] = {pathway, coupled_power_at(ld, scenario, pathway)};
  });
  return curve;
}

MaxPathwayResult max_pathway(const LaserDiodeSpec& ld, const Scenario& scenario,
                             const Requirement& req) {
  if (!(req.min_power_w > 0.0)) {
    throw std::domain_error("requirement power must be > 0");
  }
  const double at_min = coupled_power_at(ld, scenario, ld.min_pathway_m);
  if (at_min < req.min_power_w) {
    throw NoFeasibleDesign("requirement " + req.label +
                           " is not met even at the minimum pathway");
  }

  // Bisection bracket: start past the near field, where the coupled power is
  // strictly decreasing in pathway.
  const AstigmaticBeam src =
      source_beam(ld, pick(ld.theta_fwhm_1_rad, scenario.divergence_axis1),
                  pick(ld.theta_fwhm_2_rad, scenario.divergence_axis2));
  const double max_zr = std::max(src.q1_m.imag(), src.q2_m.imag());
  double lo = std::max(ld.min_pathway_m, 100.0 * max_zr);
  if (lo > ld.min_pathway_m &&
      coupled_power_at(ld, scenario, lo) < req.min_power_w) {
    lo = ld.min_pathway_m;  // crossing sits below the far-field guard
  }

  double hi = std::max(lo, 1e-3);
  while (hi < kMaxSearchPathway &&
         coupled_power_at(ld, scenario, hi) >= req.min_power_w) {
    hi = std::min(2.0 * hi, kMaxSearchPathway);
    if (hi == kMaxSearchPathway) {
      const double at_cap = coupled_power_at(ld, scenario, hi);
      if (at_cap >= req.min_power_w) {
        return MaxPathwayResult{std::nullopt, at_cap};
      }
      break;
    }
  }

  // 0.1 um bracket keeps the substituted-back power within the contract band.
  constexpr double kBracket = 0.1e-6;
  while (hi - lo > kBracket) {
    const double mid = 0.5 * (lo + hi);
    if (coupled_power_at(ld, scenario, mid) >= req.min_power_w) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return MaxPathwayResult{lo, coupled_power_at(ld, scenario, lo)};
}

SweepReport corner_sweep(const LaserDiodeSpec& ld, double pathway_m,
                         const FiberSpec& fiber,
                         const std::vector<Requirement>& reqs,
                         const StackParams& stack, double rel_tol, int jobs) {
  static constexpr LevelChoice kLevels[] = {LevelChoice::min,
                                            LevelChoice::nominal,
                                            LevelChoice::max};
  const double offsets[] = {0.0, ld.offset_bound_m.nominal,
                            ld.offset_bound_m.max};

  SweepReport report;
  report.pathway_m = pathway_m;
  for (LevelChoice d1 : kLevels)
    for (LevelChoice d2 : kLevels)
      for (double dx : offsets)
        for (double dy : offsets)
          report.corners.push_back({d1, d2, dx, dy, 0.0});

  parallel_for(static_cast<int>(report.corners.size()), jobs, [&](int i) {
    CornerSample& c = report.corners[i];
    c.coupled_power_w =
        evaluate(ld, pick(ld.theta_fwhm_1_rad, c.div1),
                 pick(ld.theta_fwhm_2_rad, c.div2), Alignment{c.dx_m, c.dy_m},
                 fiber, stack, pathway_m, rel_tol);
  });

  auto [lo, hi] = std::minmax_element(
      report.corners.begin(), report.corners.end(),
      [](const CornerSample& a, const CornerSample& b) {
        return a.coupled_power_w < b.coupled_power_w;
      });
  report.worst_power_w = lo->coupled_power_w;
  report.best_power_w = hi->coupled_power_w;
  for (const Requirement& req : reqs) {
    const double margin = report.worst_power_w - req.min_power_w;
    report.margins.push_back({req, margin, margin >= 0.0});
  }
  return report;
}

MonteCarloReport tolerance_monte_carlo(const LaserDiodeSpec& ld,
                                       double pathway_m, const FiberSpec& fiber,
                                       int n, std::uint64_t seed,
                                       const std::vector<Requirement>& reqs,
                                       const StackParams& stack, double rel_tol,
                                       int jobs) {
  if (n < 100) throw std::domain_error("Monte Carlo needs n >= 100");

  MonteCarloReport report;
  report.n = n;
  report.seed = seed;
  report.pathway_m = pathway_m;
  report.samples.resize(n);

  parallel_for(n, jobs, [&](int i) {
    Substream rng(seed, static_cast<std::uint64_t>(i));
    MonteCarloSample& s = report.samples[i];
    s.theta1_rad = rng.uniform(ld.theta_fwhm_1_rad.min, ld.theta_fwhm_1_rad.max);
    s.theta2_rad = rng.uniform(ld.theta_fwhm_2_rad.min, ld.theta_fwhm_2_rad.max);
    s.dx_m = rng.uniform(-ld.offset_bound_m.max, ld.offset_bound_m.max);
    s.dy_m = rng.uniform(-ld.offset_bound_m.max, ld.offset_bound_m.max);
    s.coupled_power_w = evaluate(ld, s.theta1_rad, s.theta2_rad,
                                 Alignment{s.dx_m, s.dy_m}, fiber, stack,
                                 pathway_m, rel_tol);
  });

  std::vector<double> powers(n);
  for (int i = 0; i < n; ++i) powers[i] = report.samples[i].coupled_power_w;
  report.p5_w = percentile(powers, 5.0);
  report.p50_w = percentile(powers, 50.0);
  report.p95_w = percentile(powers, 95.0);
  const auto [mn, mx] = std::minmax_element(powers.begin(), powers.end());
  report.min_w = *mn;
  report.max_w = *mx;
  for (const Requirement& req : reqs) {
    const long hits = std::count_if(powers.begin(), powers.end(),
                                    [&](double p) { return p >= req.min_power_w; });
    report.pass.push_back({req, static_cast<double>(hits) / n});
  }
  return report;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::domain_error("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = (p / 100.0) * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace dualbeam
