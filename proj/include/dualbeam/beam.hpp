// Simple astigmatic Gaussian (SAG) beam: two complex q parameters, one per
// transverse axis, plus the elementary transforms (free propagation, flat
// refraction, Fresnel transmission).
//
// Conventions: SI units throughout. q_i = (z - z0_i) + i*zR_i in the current
// medium; all per-medium formulas use lambda_medium = lambda_vacuum / n, which
// keeps spot sizes continuous across flat interfaces. The spot semi-axes
// returned by beam_geometry are the physical (M-scaled) 1/e^2 radii; the
// intensity profile is power-normalized against them.

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>

namespace dualbeam {

// FWHM -> 1/e^2 full-angle factor for a Gaussian far field, 2/sqrt(2 ln 2).
inline constexpr double kFwhmToInvE2 = 1.699;

// Hard amplitude/geometry sanity bounds for constructor validation.
inline constexpr double kMinWavelength = 100e-9;
inline constexpr double kMaxWavelength = 20e-6;

struct AstigmaticBeam {
  double vacuum_wavelength_m;
  double power_w;
  double msq;                    // beam quality factor M^2, >= 1
  std::complex<double> q1_m;     // axis 1: real = z - z0, imag = zR (> 0)
  std::complex<double> q2_m;     // axis 2
  double medium_index;           // n of the medium the beam currently occupies

  AstigmaticBeam(double vacuum_wavelength, double power, double msq,
                 std::complex<double> q1, std::complex<double> q2,
                 double medium_index = 1.0);

  double wavelength_in_medium() const {
    return vacuum_wavelength_m / medium_index;
  }
};

struct InterfacePair {
  double n1;
  double n2;
};

struct BeamGeometry {
  double w1_m;                     // 1/e^2 intensity semi-axes of the spot
  double w2_m;
  std::optional<double> r1_m;      // wavefront curvature radius; nullopt = flat
  std::optional<double> r2_m;
};

/// Rayleigh distance from a FWHM divergence angle:
/// zR = 4*lambda*M^2 / ((theta_fwhm * 1.699)^2 * pi).
/// Angle and wavelength must be quoted in the same medium.
double rayleigh_from_fwhm(double theta_fwhm_rad, double wavelength_in_medium_m,
                          double msq);

/// Beam at its waist from source parameters. Divergence angles are quoted in
/// the medium of `medium_index` (datasheet angles are in air, n = 1).
AstigmaticBeam beam_from_spec(double vacuum_wavelength_m, double power_w,
                              double theta_fwhm_1_rad, double theta_fwhm_2_rad,
                              double msq = 1.3, double medium_index = 1.0);

/// Free propagation by d >= 0 in the current medium: q_i' = q_i + d.
AstigmaticBeam propagate(const AstigmaticBeam& beam, double distance_m);

/// Flat-interface refraction into index n_out: q_i' = q_i * (n_out / n_in).
/// Power is unchanged; Fresnel loss is a separate operation (fresnel_t).
AstigmaticBeam refract_flat(const AstigmaticBeam& beam, double n_out);

/// Spot semi-axes and curvature radii at the beam's current plane.
/// w_i = M * sqrt(lambda_med * |q_i|^2 / (pi * zR_i)); R_i = |q_i|^2 / Re(q_i),
/// reported flat at a waist (Re q_i = 0).
BeamGeometry beam_geometry(const AstigmaticBeam& beam);

/// Intensity at transverse point (x, y) in the beam's current plane:
/// I = 2P/(pi*w1*w2) * exp(-2x^2/w1^2) * exp(-2y^2/w2^2).
/// Integrates to exactly P over the plane.
double intensity_at(const AstigmaticBeam& beam, double x_m, double y_m);

/// Normal-incidence Fresnel power transmission T = 4*n1*n2/(n1+n2)^2.
double fresnel_t(const InterfacePair& pair);

}  // namespace dualbeam
