#include "dualbeam/beam.hpp"

#include <cmath>

namespace dualbeam {

namespace {

void check_index(double n, const char* what) {
  if (!(n >= 1.0) || !std::isfinite(n)) {
    throw std::domain_error(std::string(what) + " must be a finite index >= 1");
  }
}

}  // namespace

AstigmaticBeam::AstigmaticBeam(double vacuum_wavelength, double power,
                               double msq_, std::complex<double> q1,
                               std::complex<double> q2, double medium_index_)
    : vacuum_wavelength_m(vacuum_wavelength),
      power_w(power),
      msq(msq_),
      q1_m(q1),
      q2_m(q2),
      medium_index(medium_index_) {
  if (!(vacuum_wavelength > kMinWavelength && vacuum_wavelength < kMaxWavelength)) {
    throw std::domain_error("vacuum wavelength outside (100 nm, 20 um)");
  }
  if (!(power >= 0.0) || !std::isfinite(power)) {
    throw std::domain_error("beam power must be finite and >= 0");
  }
  if (!(msq >= 1.0)) {
    throw std::domain_error("M^2 must be >= 1");
  }
  check_index(medium_index, "medium index");
  if (!(q1.imag() > 0.0) || !(q2.imag() > 0.0)) {
    throw std::domain_error("Rayleigh distances (imag q) must be > 0");
  }
}

double rayleigh_from_fwhm(double theta_fwhm_rad, double wavelength_in_medium_m,
                          double msq) {
  if (!(theta_fwhm_rad > 0.0 && theta_fwhm_rad < M_PI / 2.0)) {
    throw std::domain_error("FWHM divergence must lie in (0, pi/2)");
  }
  if (!(wavelength_in_medium_m > 0.0)) {
    throw std::domain_error("wavelength must be > 0");
  }
  if (!(msq > 0.0)) {
    throw std::domain_error("M^2 must be > 0");
  }
  const double theta_e2 = theta_fwhm_rad * kFwhmToInvE2;
  return 4.0 * wavelength_in_medium_m * msq / (theta_e2 * theta_e2 * M_PI);
}

AstigmaticBeam beam_from_spec(double vacuum_wavelength_m, double power_w,
                              double theta_fwhm_1_rad, double theta_fwhm_2_rad,
                              double msq, double medium_index) {
  check_index(medium_index, "medium index");
  const double lambda_med = vacuum_wavelength_m / medium_index;
  const double zr1 = rayleigh_from_fwhm(theta_fwhm_1_rad, lambda_med, msq);
  const double zr2 = rayleigh_from_fwhm(theta_fwhm_2_rad, lambda_med, msq);
  return AstigmaticBeam(vacuum_wavelength_m, power_w, msq, {0.0, zr1},
                        {0.0, zr2}, medium_index);
}

AstigmaticBeam propagate(const AstigmaticBeam& beam, double distance_m) {
  if (!(distance_m >= 0.0) || !std::isfinite(distance_m)) {
    throw std::domain_error("propagation distance must be >= 0");
  }
  AstigmaticBeam out = beam;
  out.q1_m += distance_m;
  out.q2_m += distance_m;
  return out;
}

AstigmaticBeam refract_flat(const AstigmaticBeam& beam, double n_out) {
  check_index(n_out, "n_out");
  const double ratio = n_out / beam.medium_index;
  AstigmaticBeam out = beam;
  out.q1_m *= ratio;
  out.q2_m *= ratio;
  out.medium_index = n_out;
  return out;
}

BeamGeometry beam_geometry(const AstigmaticBeam& beam) {
  const double lambda_med = beam.wavelength_in_medium();
  const auto spot = [&](const std::complex<double>& q) {
    return std::sqrt(beam.msq * lambda_med * std::norm(q) /
                     (M_PI * q.imag()));
  };
  const auto curvature = [](const std::complex<double>& q)
      -> std::optional<double> {
    if (q.real() == 0.0) return std::nullopt;  // waist: flat wavefront
    return std::norm(q) / q.real();
  };
  return BeamGeometry{spot(beam.q1_m), spot(beam.q2_m), curvature(beam.q1_m),
                      curvature(beam.q2_m)};
}

double intensity_at(const AstigmaticBeam& beam, double x_m, double y_m) {
  const BeamGeometry g = beam_geometry(beam);
  const double peak = 2.0 * beam.power_w / (M_PI * g.w1_m * g.w2_m);
  const double ax = x_m / g.w1_m;
  const double ay = y_m / g.w2_m;
  return peak * std::exp(-2.0 * (ax * ax + ay * ay));
}

double fresnel_t(const InterfacePair& pair) {
  check_index(pair.n1, "n1");
  check_index(pair.n2, "n2");
  const double s = pair.n1 + pair.n2;
  return 4.0 * pair.n1 * pair.n2 / (s * s);
}

}  // namespace dualbeam
