#include <doctest.h>

#include <cmath>
#include <random>

#include "dualbeam/coupling.hpp"

using namespace dualbeam;

namespace {

// Independent circular-beam coupling oracle. Centered it is the closed form
// 1 - exp(-2 r^2 / w^2); at offset d it is the radial Bessel integral
//   exp(-2 d^2/w^2) * Int_0^r (4 rho / w^2) exp(-2 rho^2/w^2) I0(4 rho d/w^2)
// evaluated by composite Simpson on a fine fixed grid.
double circular_oracle(double w, double r, double d) {
  if (d == 0.0) return 1.0 - std::exp(-2.0 * r * r / (w * w));
  const auto f = [&](double rho) {
    return 4.0 * rho / (w * w) *
           std::exp(-2.0 * (rho * rho + d * d) / (w * w)) *
           std::cyl_bessel_i(0.0, 4.0 * rho * d / (w * w));
  };
  const int n = 20000;  // even
  const double h = r / n;
  double sum = f(0.0) + f(r);
  for (int i = 1; i < n; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Beam whose physical spot at the waist equals w (for the given M^2).
AstigmaticBeam beam_with_spot(double w, double power = 10e-3,
                              double msq = 1.3) {
  const double lambda = 638e-9;
  const double zr = M_PI * w * w / (msq * lambda);
  return AstigmaticBeam(lambda, power, msq, {0.0, zr}, {0.0, zr}, 1.0);
}

}  // namespace

TEST_CASE("oracle self-check: Bessel integral reduces to the closed form") {
  for (double w_over_r : {0.2, 1.0, 5.0}) {
    const double r = 25e-6, w = w_over_r * r;
    const double closed = 1.0 - std::exp(-2.0 * r * r / (w * w));
    const auto f = [&](double rho) {
      return 4.0 * rho / (w * w) * std::exp(-2.0 * rho * rho / (w * w));
    };
    const int n = 20000;
    const double h = r / n;
    double sum = f(0.0) + f(r);
    for (int i = 1; i < n; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
    CHECK(sum * h / 3.0 == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("coupled fraction matches the circular-beam oracle to 1e-6") {
  const double r = 25e-6;
  for (double w_over_r : {0.2, 1.0, 5.0}) {
    const double w = w_over_r * r;
    const AstigmaticBeam beam = beam_with_spot(w);
    const FiberSpec fiber{r, 1.5, {}};

    const CouplingResult centered =
        coupled_power(beam, fiber, Alignment{0.0, 0.0});
    const double want_centered = circular_oracle(w, r, 0.0);
    CHECK(centered.coupled_power_w / beam.power_w ==
          doctest::Approx(want_centered).epsilon(1e-6));

    const CouplingResult offset =
        coupled_power(beam, fiber, Alignment{0.5 * r, 0.0});
    const double want_offset = circular_oracle(w, r, 0.5 * r);
    CHECK(offset.coupled_power_w / beam.power_w ==
          doctest::Approx(want_offset).epsilon(1e-6));

    // diagonal offset with the same norm gives the same fraction
    const double diag = 0.5 * r / std::sqrt(2.0);
    const CouplingResult diag_offset =
        coupled_power(beam, fiber, Alignment{diag, diag});
    CHECK(diag_offset.coupled_power_w ==
          doctest::Approx(offset.coupled_power_w).epsilon(1e-8));
  }
}

TEST_CASE("a wide-open centered core captures the whole beam") {
  const AstigmaticBeam beam = beam_with_spot(10e-6);
  const FiberSpec fiber{10.0 * 10e-6, 1.5, {}};
  const CouplingResult result = coupled_power(beam, fiber, {});
  CHECK(result.coupled_power_w == doctest::Approx(beam.power_w).epsilon(1e-6));
  CHECK(result.efficiency == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("far-offset coupling vanishes into the Gaussian tail") {
  const double w = 10e-6, r = 25e-6;
  const AstigmaticBeam beam = beam_with_spot(w);
  const FiberSpec fiber{r, 1.5, {}};
  const CouplingResult result =
      coupled_power(beam, fiber, Alignment{r + 6.5 * w, 0.0});
  CHECK(result.coupled_power_w / beam.power_w < 1e-6);
}

TEST_CASE("coupling is monotone in radius and offsets") {
  const AstigmaticBeam beam = beam_with_spot(20e-6);
  double prev = 0.0;
  for (double r : {10e-6, 20e-6, 40e-6}) {
    const double p =
        coupled_power(beam, FiberSpec{r, 1.5, {}}, {}).coupled_power_w;
    CHECK(p > prev);
    prev = p;
  }
  const FiberSpec fiber{25e-6, 1.5, {}};
  prev = 1e9;
  for (double dx : {0.0, 8e-6, 16e-6}) {
    const double p =
        coupled_power(beam, fiber, Alignment{dx, 0.0}).coupled_power_w;
    CHECK(p < prev);
    prev = p;
  }
  prev = 1e9;
  for (double dy : {0.0, 8e-6, 16e-6}) {
    const double p =
        coupled_power(beam, fiber, Alignment{0.0, dy}).coupled_power_w;
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("coupling symmetries") {
  const double lambda = 450e-9;
  const AstigmaticBeam beam(lambda, 5e-3, 1.3, {0.0, 30e-6}, {0.0, 8e-6}, 1.0);
  const FiberSpec fiber{25e-6, 1.5, {}};
  const Alignment off{7e-6, -4e-6};
  const Alignment neg{-7e-6, 4e-6};
  CHECK(coupled_power(beam, fiber, off).coupled_power_w ==
        doctest::Approx(coupled_power(beam, fiber, neg).coupled_power_w)
            .epsilon(1e-9));

  const AstigmaticBeam round = beam_with_spot(18e-6);
  CHECK(coupled_power(round, fiber, Alignment{9e-6, 2e-6}).coupled_power_w ==
        doctest::Approx(
            coupled_power(round, fiber, Alignment{2e-6, 9e-6}).coupled_power_w)
            .epsilon(1e-8));
}

TEST_CASE("energy is conserved over a radius-8w disc for random beams") {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> zr(1e-6, 100e-6);
  std::uniform_real_distribution<double> z(0.0, 3e-3);
  std::uniform_real_distribution<double> msq(1.0, 2.0);
  for (int i = 0; i < 25; ++i) {
    AstigmaticBeam beam(532e-9, 10e-3, msq(gen), {0.0, zr(gen)},
                        {0.0, zr(gen)}, 1.0);
    beam = propagate(beam, z(gen));
    const BeamGeometry g = beam_geometry(beam);
    const double radius = 8.0 * std::max(g.w1_m, g.w2_m);
    const double fraction =
        gaussian_disc_fraction(g.w1_m, g.w2_m, radius, 0.0, 0.0, 1e-9);
    CHECK(fraction == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("reported quadrature error bound is consistent with rel_tol") {
  const AstigmaticBeam beam = beam_with_spot(20e-6);
  const FiberSpec fiber{25e-6, 1.5, {}};
  const CouplingResult result = coupled_power(beam, fiber, {}, 1e-8);
  CHECK(result.quadrature_error_w <= 1e-6 * result.coupled_power_w);
  CHECK(result.quadrature_error_w >= 0.0);
}

TEST_CASE("acceptance-NA clipping only ever reduces the coupled power") {
  // Tight waist so the far-field divergence exceeds asin(NA/n).
  AstigmaticBeam beam = beam_with_spot(0.5e-6);
  beam = refract_flat(beam, 1.5);
  const FiberSpec open{25e-6, 1.5, {}};
  FiberSpec clipped = open;
  clipped.acceptance_na = 0.22;
  const double p_open = coupled_power(beam, open, {}).coupled_power_w;
  const double p_clip = coupled_power(beam, clipped, {}).coupled_power_w;
  CHECK(p_clip < p_open);
  CHECK(p_clip > 0.0);

  FiberSpec bad = open;
  bad.acceptance_na = 2.0;  // >= core index
  CHECK_THROWS_AS(coupled_power(beam, bad, {}), std::domain_error);
}

TEST_CASE("rel_tol outside the contract range is rejected") {
  const AstigmaticBeam beam = beam_with_spot(20e-6);
  const FiberSpec fiber{25e-6, 1.5, {}};
  CHECK_THROWS_AS(coupled_power(beam, fiber, {}, 1e-13), std::domain_error);
  CHECK_THROWS_AS(coupled_power(beam, fiber, {}, 0.5), std::domain_error);
}

TEST_CASE("efficiency is quoted against the pre-loss source power") {
  const AstigmaticBeam beam = beam_with_spot(10e-6, 7e-3);
  const FiberSpec fiber{100e-6, 1.5, {}};
  const CouplingResult result = coupled_power(beam, fiber, {}, 1e-6, 45e-3);
  CHECK(result.efficiency ==
        doctest::Approx(result.coupled_power_w / 45e-3).epsilon(1e-12));
}
