// Power coupled from a beam at the fiber face into an offset circular core.

#pragma once

#include <optional>
#include <stdexcept>

#include "dualbeam/beam.hpp"

namespace dualbeam {

struct FiberSpec {
  double core_radius_m = 25e-6;
  double core_index = 1.5;
  // Optional clipping by the fiber acceptance cone; off by default, matching
  // the predictive model the design numbers rest on.
  std::optional<double> acceptance_na;
};

struct Alignment {
  double dx_m = 0.0;  // transverse offset of the core center from the beam axis
  double dy_m = 0.0;
};

struct CouplingResult {
  double coupled_power_w;
  double efficiency;          // fraction of source power (pre stack losses)
  double quadrature_error_w;  // bound on the integration error
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& msg, double best_estimate,
                  double error_bound)
      : std::runtime_error(msg),
        best_estimate(best_estimate),
        error_bound(error_bound) {}

  double best_estimate;
  double error_bound;
};

/// Fraction of a normalized elliptic Gaussian (1/e^2 semi-axes w1, w2,
/// centered at the origin) falling inside the disc of radius r centered at
/// (dx, dy). The y-integral over each disc chord is closed form (erf); the
/// remaining x-integral is evaluated by deterministic adaptive quadrature to
/// rel_tol. err_bound, when given, receives the accumulated error estimate.
double gaussian_disc_fraction(double w1_m, double w2_m, double radius_m,
                              double dx_m, double dy_m, double rel_tol = 1e-6,
                              double* err_bound = nullptr);

/// Power coupled into the fiber core from the beam at the face.
/// efficiency = coupled power / source_power_w; source_power_w defaults to
/// the beam's own (post-loss) power when not given.
CouplingResult coupled_power(const AstigmaticBeam& beam_at_face,
                             const FiberSpec& fiber, const Alignment& align,
                             double rel_tol = 1e-6,
                             std::optional<double> source_power_w = {});

}  // namespace dualbeam
