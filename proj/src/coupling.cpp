#include "dualbeam/coupling.hpp"

#include <cmath>

namespace dualbeam {

namespace {

// Adaptive Simpson with Richardson extrapolation. The integrands below are
// smooth on the mapped interval, so the classic |S2-S1|/15 estimate is sound.
struct AdaptiveSimpson {
  double abs_tol;
  long max_evals;
  long evals = 0;
  double err_accum = 0.0;

  template <typename F>
  double integrate(const F& f, double a, double b) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    evals += 3;
    const double s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(f, a, b, fa, fm, fb, s, abs_tol, 0);
  }

  template <typename F>
  double recurse(const F& f, double a, double b, double fa, double fm,
                 double fb, double s, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    evals += 2;
    const double sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double s2 = sl + sr;
    const double err = (s2 - s) / 15.0;
    if (depth >= 60 || evals > max_evals) {
      err_accum += std::abs(err);
      if (evals > max_evals) {
        throw QuadratureError("disc quadrature exceeded its evaluation budget",
                              s2 + err, err_accum);
      }
      return s2 + err;
    }
    if (std::abs(err) <= tol) {
      err_accum += std::abs(err);
      return s2 + err;
    }
    return recurse(f, a, m, fa, flm, fm, sl, 0.5 * tol, depth + 1) +
           recurse(f, m, b, fm, frm, fb, sr, 0.5 * tol, depth + 1);
  }
};

double erf_interval(double lo, double hi) {
  // integral of sqrt(2/pi) * exp(-2 t^2) scaled: returns
  // 0.5 * (erf(sqrt(2) hi) - erf(sqrt(2) lo)), the Gaussian mass in [lo, hi]
  // for a profile exp(-2 t^2 / w^2) normalized on t/w.
  const double rt2 = std::sqrt(2.0);
  return 0.5 * (std::erf(rt2 * hi) - std::erf(rt2 * lo));
}

}  // namespace

double gaussian_disc_fraction(double w1_m, double w2_m, double radius_m,
                              double dx_m, double dy_m, double rel_tol,
                              double* err_bound) {
  if (!(w1_m > 0.0 && w2_m > 0.0)) {
    throw std::domain_error("spot semi-axes must be > 0");
  }
  if (!(radius_m > 0.0)) {
    throw std::domain_error("disc radius must be > 0");
  }
  if (!(rel_tol > 1e-12 && rel_tol < 1e-2)) {
    throw std::domain_error("rel_tol must lie in (1e-12, 1e-2)");
  }

  // Map x = dx + r sin(t): the chord half-height r cos(t) absorbs the sqrt
  // endpoint behaviour and the integrand becomes smooth on [-pi/2, pi/2].
  const auto integrand = [&](double t) {
    const double st = std::sin(t), ct = std::cos(t);
    const double x = dx_m + radius_m * st;
    const double half_chord = radius_m * ct;
    const double gx = std::sqrt(2.0 / M_PI) / w1_m *
                      std::exp(-2.0 * (x / w1_m) * (x / w1_m));
    const double gy =
        erf_interval((dy_m - half_chord) / w2_m, (dy_m + half_chord) / w2_m);
    return gx * gy * radius_m * ct;
  };

  // Coarse pass to scale the absolute tolerance, then the adaptive pass.
  double rough = 0.0;
  {
    constexpr int n = 32;
    const double h = M_PI / n;
    for (int i = 0; i < n; ++i) {
      const double a = -M_PI / 2 + i * h;
      rough += h / 6.0 *
               (integrand(a) + 4.0 * integrand(a + 0.5 * h) + integrand(a + h));
    }
  }
  if (!(rough > 5e-324)) {
    if (err_bound) *err_bound = 0.0;
    return 0.0;
  }

  AdaptiveSimpson quad{rel_tol * rough, 4'000'000};
  double result = quad.integrate(integrand, -M_PI / 2.0, M_PI / 2.0);
  if (result > 0.0 && (result < 0.25 * rough || result > 4.0 * rough)) {
    // Coarse scale was off; redo against the refined estimate.
    AdaptiveSimpson quad2{rel_tol * result, 4'000'000};
    result = quad2.integrate(integrand, -M_PI / 2.0, M_PI / 2.0);
    quad.err_accum = quad2.err_accum;
  }
  if (err_bound) *err_bound = quad.err_accum;
  return std::min(std::max(result, 0.0), 1.0);
}

CouplingResult coupled_power(const AstigmaticBeam& beam_at_face,
                             const FiberSpec& fiber, const Alignment& align,
                             double rel_tol,
                             std::optional<double> source_power_w) {
  if (!(fiber.core_radius_m > 0.0)) {
    throw std::domain_error("fiber core radius must be > 0");
  }
  if (fiber.acceptance_na &&
      !(*fiber.acceptance_na > 0.0 && *fiber.acceptance_na < fiber.core_index)) {
    throw std::domain_error("acceptance NA must lie in (0, core index)");
  }
  if (!std::isfinite(align.dx_m) || !std::isfinite(align.dy_m)) {
    throw std::domain_error("alignment offsets must be finite");
  }

  const BeamGeometry g = beam_geometry(beam_at_face);
  double err = 0.0;
  double fraction = gaussian_disc_fraction(g.w1_m, g.w2_m, fiber.core_radius_m,
                                           align.dx_m, align.dy_m, rel_tol,
                                           &err);

  if (fiber.acceptance_na) {
    // Fraction of the far-field angular Gaussian within the acceptance cone.
    const double lambda_med = beam_at_face.wavelength_in_medium();
    const double slope1 = std::sqrt(beam_at_face.msq * lambda_med /
                                    (M_PI * beam_at_face.q1_m.imag()));
    const double slope2 = std::sqrt(beam_at_face.msq * lambda_med /
                                    (M_PI * beam_at_face.q2_m.imag()));
    const double cone =
        std::asin(*fiber.acceptance_na / beam_at_face.medium_index);
    double cone_err = 0.0;
    const double cone_fraction = gaussian_disc_fraction(
        slope1, slope2, cone, 0.0, 0.0, rel_tol, &cone_err);
    err = err * cone_fraction + cone_err * fraction;
    fraction *= cone_fraction;
  }

  const double source = source_power_w.value_or(beam_at_face.power_w);
  CouplingResult result;
  result.coupled_power_w = fraction * beam_at_face.power_w;
  result.efficiency = source > 0.0 ? result.coupled_power_w / source : 0.0;
  result.quadrature_error_w = err * beam_at_face.power_w;
  return result;
}

}  // namespace dualbeam
