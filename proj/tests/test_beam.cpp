#include <doctest.h>

#include <cmath>
#include <random>

#include "dualbeam/beam.hpp"

using namespace dualbeam;

namespace {

constexpr double kDeg = M_PI / 180.0;

// Midpoint Riemann sum of the intensity over a centered rectangle; converges
// exponentially for a Gaussian, so it serves as an independent power check.
double plane_integral(const AstigmaticBeam& beam, double half_extent, int n) {
  const double h = 2.0 * half_extent / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -half_extent + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = -half_extent + (j + 0.5) * h;
      sum += intensity_at(beam, x, y);
    }
  }
  return sum * h * h;
}

}  // namespace

TEST_CASE("rayleigh_from_fwhm reproduces the source-datasheet values") {
  // Frozen from direct evaluation of the defining formula (oracle script).
  CHECK(rayleigh_from_fwhm(7.5 * kDeg, 450e-9, 1.3) ==
        doctest::Approx(15.0592022141e-6).epsilon(1e-9));
  CHECK(rayleigh_from_fwhm(8.5 * kDeg, 638e-9, 1.3) ==
        doctest::Approx(16.6224411983e-6).epsilon(1e-9));
  CHECK(rayleigh_from_fwhm(21.5 * kDeg, 450e-9, 1.3) ==
        doctest::Approx(1.83251514233e-6).epsilon(1e-9));
}

TEST_CASE("rayleigh_from_fwhm inverse-square and linear scalings") {
  std::mt19937 gen(123);
  std::uniform_real_distribution<double> theta(0.02, 0.6);
  std::uniform_real_distribution<double> lam(200e-9, 2e-6);
  for (int i = 0; i < 50; ++i) {
    const double th = theta(gen);
    const double wl = lam(gen);
    const double base = rayleigh_from_fwhm(th, wl, 1.3);
    CHECK(rayleigh_from_fwhm(2.0 * th, wl, 1.3) ==
          doctest::Approx(base / 4.0).epsilon(1e-12));
    CHECK(rayleigh_from_fwhm(th, 2.0 * wl, 1.3) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
    CHECK(rayleigh_from_fwhm(th, wl, 2.6) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
    // strictly decreasing in theta
    CHECK(rayleigh_from_fwhm(th * 1.01, wl, 1.3) < base);
  }
}

TEST_CASE("rayleigh_from_fwhm rejects out-of-range inputs") {
  CHECK_THROWS_AS(rayleigh_from_fwhm(0.0, 450e-9, 1.3), std::domain_error);
  CHECK_THROWS_AS(rayleigh_from_fwhm(-0.1, 450e-9, 1.3), std::domain_error);
  CHECK_THROWS_AS(rayleigh_from_fwhm(M_PI / 2, 450e-9, 1.3), std::domain_error);
  CHECK_THROWS_AS(rayleigh_from_fwhm(0.1, 0.0, 1.3), std::domain_error);
  CHECK_THROWS_AS(rayleigh_from_fwhm(0.1, 450e-9, 0.0), std::domain_error);
}

TEST_CASE("beam_from_spec places the waist with per-axis Rayleigh distances") {
  const AstigmaticBeam blue =
      beam_from_spec(450e-9, 88e-3, 7.5 * kDeg, 21.5 * kDeg, 1.3);
  CHECK(blue.q1_m.real() == 0.0);
  CHECK(blue.q2_m.real() == 0.0);
  CHECK(blue.q1_m.imag() == doctest::Approx(15.0592022141e-6).epsilon(1e-9));
  CHECK(blue.q2_m.imag() == doctest::Approx(1.83251514233e-6).epsilon(1e-9));
  CHECK(blue.power_w == 88e-3);
  CHECK(blue.medium_index == 1.0);

  SUBCASE("zero-power spec gives a valid dark beam") {
    const AstigmaticBeam dark =
        beam_from_spec(450e-9, 0.0, 7.5 * kDeg, 21.5 * kDeg);
    CHECK(intensity_at(dark, 0.0, 0.0) == 0.0);
    CHECK(intensity_at(dark, 1e-6, -2e-6) == 0.0);
  }

  SUBCASE("symmetric angles make the two axes identical") {
    const AstigmaticBeam round = beam_from_spec(638e-9, 1e-3, 0.2, 0.2);
    CHECK(round.q1_m == round.q2_m);
  }
}

TEST_CASE("propagate shifts the waist distance and composes additively") {
  const AstigmaticBeam beam = beam_from_spec(450e-9, 88e-3, 0.13, 0.37);
  const double zr1 = beam.q1_m.imag();

  const AstigmaticBeam moved = propagate(beam, 1e-3);
  CHECK(moved.q1_m.real() == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(moved.q1_m.imag() == zr1);
  CHECK(moved.power_w == beam.power_w);
  CHECK(moved.medium_index == beam.medium_index);

  const AstigmaticBeam two_step = propagate(propagate(beam, 0.4e-3), 0.6e-3);
  CHECK(two_step.q1_m.real() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(two_step.q2_m.real() == doctest::Approx(1e-3).epsilon(1e-12));

  CHECK_THROWS_AS(propagate(beam, -1e-9), std::domain_error);
}

TEST_CASE("far field divergence approaches 1.699*theta_fwhm/2") {
  const double theta = 7.5 * kDeg;
  const AstigmaticBeam beam = beam_from_spec(450e-9, 88e-3, theta, 21.5 * kDeg);
  const double z = 1e4 * beam.q1_m.imag();
  const BeamGeometry g = beam_geometry(propagate(beam, z));
  const double slope = g.w1_m / z;
  const double expected = kFwhmToInvE2 * theta / 2.0;
  CHECK(slope == doctest::Approx(expected).epsilon(1e-7));
  // the slope is the paraxial angle; against tan only to first order
  CHECK(slope == doctest::Approx(std::tan(expected)).epsilon(1e-2));
}

TEST_CASE("refract_flat is the identity at matched index") {
  const AstigmaticBeam beam = beam_from_spec(450e-9, 88e-3, 0.13, 0.37);
  const AstigmaticBeam same = refract_flat(beam, 1.0);
  CHECK(same.q1_m == beam.q1_m);
  CHECK(same.q2_m == beam.q2_m);
  CHECK(same.power_w == beam.power_w);
}

TEST_CASE("spot size is continuous across a flat interface") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> theta(0.05, 0.5);
  std::uniform_real_distribution<double> dist(0.0, 5e-3);
  std::uniform_real_distribution<double> index(1.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    AstigmaticBeam beam =
        beam_from_spec(450e-9, 88e-3, theta(gen), theta(gen), 1.3);
    beam = propagate(beam, dist(gen));
    const double n_out = index(gen);
    const BeamGeometry before = beam_geometry(beam);
    const BeamGeometry after = beam_geometry(refract_flat(beam, n_out));
    CHECK(after.w1_m == doctest::Approx(before.w1_m).epsilon(1e-12));
    CHECK(after.w2_m == doctest::Approx(before.w2_m).epsilon(1e-12));
  }
}

TEST_CASE("refraction into glue scales the far-field divergence by 1/n") {
  const AstigmaticBeam beam = beam_from_spec(450e-9, 88e-3, 0.13, 0.37);
  const double z = 1e5 * beam.q2_m.imag();

  const BeamGeometry in_air = beam_geometry(propagate(beam, z));
  const AstigmaticBeam in_glue = refract_flat(beam, 1.54);
  const BeamGeometry glue = beam_geometry(propagate(in_glue, z));
  CHECK(glue.w1_m / z ==
        doctest::Approx(in_air.w1_m / z / 1.54).epsilon(1e-9));
}

TEST_CASE("beam_geometry at the waist") {
  const AstigmaticBeam blue =
      beam_from_spec(450e-9, 88e-3, 7.5 * kDeg, 21.5 * kDeg, 1.3);
  const BeamGeometry g = beam_geometry(blue);
  CHECK_FALSE(g.r1_m.has_value());  // flat wavefront at the waist
  CHECK_FALSE(g.r2_m.has_value());
  // Frozen from the model oracle: w = M * sqrt(lambda * zR / pi).
  CHECK(g.w1_m == doctest::Approx(1.67457259369e-6).epsilon(1e-9));

  SUBCASE("w grows by sqrt(2) at one Rayleigh distance") {
    const BeamGeometry far = beam_geometry(propagate(blue, blue.q1_m.imag()));
    CHECK(far.w1_m == doctest::Approx(std::sqrt(2.0) * g.w1_m).epsilon(1e-12));
  }

  SUBCASE("R equals 2 zR when real and imaginary parts are equal") {
    const double zr = 3e-6;
    const AstigmaticBeam b(450e-9, 1e-3, 1.3, {zr, zr}, {zr, zr}, 1.0);
    const BeamGeometry gb = beam_geometry(b);
    REQUIRE(gb.r1_m.has_value());
    CHECK(*gb.r1_m == doctest::Approx(2.0 * zr).epsilon(1e-12));
  }
}

TEST_CASE("intensity is power-normalized with the on-axis closed form") {
  const AstigmaticBeam beam =
      beam_from_spec(450e-9, 88e-3, 7.5 * kDeg, 21.5 * kDeg, 1.3);
  const BeamGeometry g = beam_geometry(beam);

  CHECK(intensity_at(beam, 0.0, 0.0) ==
        doctest::Approx(2.0 * beam.power_w / (M_PI * g.w1_m * g.w2_m))
            .epsilon(1e-12));

  const double extent = 6.0 * std::max(g.w1_m, g.w2_m);
  CHECK(plane_integral(beam, extent, 600) ==
        doctest::Approx(beam.power_w).epsilon(1e-9));
}

TEST_CASE("fresnel_t matches the published interface values") {
  CHECK(fresnel_t({1.0, 1.0}) == 1.0);
  CHECK(fresnel_t({1.5, 1.5}) == 1.0);
  // Frozen arithmetic for the cap/glue/fiber indices.
  CHECK(fresnel_t({1.5, 1.54}) == doctest::Approx(0.9998268698).epsilon(1e-9));
  CHECK(fresnel_t({1.0, 1.5}) == doctest::Approx(0.96).epsilon(1e-12));

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> index(1.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double n1 = index(gen), n2 = index(gen);
    const double t = fresnel_t({n1, n2});
    CHECK(t == fresnel_t({n2, n1}));
    CHECK(t <= 1.0);
    if (n1 != n2) CHECK(t < 1.0);
  }
}

TEST_CASE("beam constructor enforces the invariants") {
  CHECK_THROWS_AS(AstigmaticBeam(450e-9, 1.0, 1.3, {0.0, -1e-6}, {0.0, 1e-6}),
                  std::domain_error);
  CHECK_THROWS_AS(AstigmaticBeam(450e-9, -1.0, 1.3, {0.0, 1e-6}, {0.0, 1e-6}),
                  std::domain_error);
  CHECK_THROWS_AS(AstigmaticBeam(50e-9, 1.0, 1.3, {0.0, 1e-6}, {0.0, 1e-6}),
                  std::domain_error);
  CHECK_THROWS_AS(AstigmaticBeam(450e-9, 1.0, 0.9, {0.0, 1e-6}, {0.0, 1e-6}),
                  std::domain_error);
  CHECK_THROWS_AS(
      AstigmaticBeam(450e-9, 1.0, 1.3, {0.0, 1e-6}, {0.0, 1e-6}, 0.5),
      std::domain_error);
}
