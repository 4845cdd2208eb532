#include <doctest.h>

#include <cmath>

#include "dualbeam/presets.hpp"
#include "dualbeam/stack.hpp"

using namespace dualbeam;

namespace {

AstigmaticBeam nominal_beam(const LaserDiodeSpec& ld) {
  return beam_from_spec(ld.vacuum_wavelength_m, ld.power_at_drive_w,
                        ld.theta_fwhm_1_rad.nominal, ld.theta_fwhm_2_rad.nominal);
}

}  // namespace

TEST_CASE("Triple rejects unordered bounds") {
  CHECK_NOTHROW(Triple(1.0, 2.0, 3.0));
  CHECK_NOTHROW(Triple(2.0, 2.0, 2.0));
  CHECK_THROWS_AS(Triple(3.0, 2.0, 1.0), std::domain_error);
}

TEST_CASE("capless unit stack is interface / glue / interface") {
  const LaserDiodeSpec red = red_hl63603tg().ld;
  const OpticalStack stack = build_unit_stack(red, 0.46e-3);
  CHECK(stack.elements.size() == 3);
  CHECK(stack.total_pathway_m() == doctest::Approx(0.46e-3).epsilon(1e-15));
  CHECK(std::holds_alternative<FlatInterface>(stack.elements.front()));
  CHECK(std::holds_alternative<Propagation>(stack.elements[1]));
  CHECK(std::holds_alternative<FlatInterface>(stack.elements.back()));
}

TEST_CASE("windowed unit stack includes the window in the pathway") {
  const LaserDiodeSpec blue = blue_pl450b().ld;
  const OpticalStack stack = build_unit_stack(blue, 2.90e-3);
  CHECK(stack.elements.size() == 5);
  CHECK(stack.total_pathway_m() == doctest::Approx(2.90e-3).epsilon(1e-15));
  const auto* window = std::get_if<Propagation>(&stack.elements[1]);
  REQUIRE(window != nullptr);
  CHECK(window->medium_index == 1.5);
  CHECK(window->distance_m == doctest::Approx(0.25e-3));
}

TEST_CASE("pathway below the mechanical minimum is a constraint error") {
  const LaserDiodeSpec blue = blue_pl450b().ld;
  CHECK_THROWS_AS(build_unit_stack(blue, 2.90e-3 - 1e-9), ConstraintError);
  try {
    build_unit_stack(blue, 1e-3);
  } catch (const ConstraintError& e) {
    CHECK(std::string(e.what()).find("2.9") != std::string::npos);
  }
}

TEST_CASE("trace through an empty stack is the identity") {
  const AstigmaticBeam beam = nominal_beam(blue_pl450b().ld);
  const AstigmaticBeam out = trace_stack(beam, OpticalStack{});
  CHECK(out.q1_m == beam.q1_m);
  CHECK(out.q2_m == beam.q2_m);
  CHECK(out.power_w == beam.power_w);
}

TEST_CASE("a single air propagation equals propagate()") {
  const AstigmaticBeam beam = nominal_beam(blue_pl450b().ld);
  OpticalStack stack;
  stack.elements.push_back(Propagation{1.0, 1.2e-3});
  const AstigmaticBeam via_stack = trace_stack(beam, stack);
  const AstigmaticBeam direct = propagate(beam, 1.2e-3);
  CHECK(via_stack.q1_m == direct.q1_m);
  CHECK(via_stack.q2_m == direct.q2_m);
}

TEST_CASE("blue power at the face is the product of interface transmissions") {
  const LaserDiodeSpec blue = blue_pl450b().ld;
  const AstigmaticBeam out =
      trace_stack(nominal_beam(blue), build_unit_stack(blue, 2.90e-3));
  // Oracle: T(1,1.5) * T(1.5,1.54) * T(1.54,1.5), computed by hand.
  const double t1 = 4.0 * 1.0 * 1.5 / (2.5 * 2.5);
  const double t2 = 4.0 * 1.5 * 1.54 / (3.04 * 3.04);
  const double expected = 88e-3 * t1 * t2 * t2;
  CHECK(out.power_w == doctest::Approx(expected).epsilon(1e-12));
  CHECK(out.power_w == doctest::Approx(88e-3 * 0.9596676188).epsilon(1e-9));
  CHECK(out.medium_index == 1.5);
}

TEST_CASE("power is non-increasing through any stack") {
  const LaserDiodeSpec red = red_hl63603tg().ld;
  const AstigmaticBeam beam = nominal_beam(red);
  const AstigmaticBeam out = trace_stack(beam, build_unit_stack(red, 1e-3));
  CHECK(out.power_w < beam.power_w);

  OpticalStack lossless;
  lossless.elements.push_back(FlatInterface{1.54, false});
  lossless.elements.push_back(Propagation{1.54, 1e-3});
  CHECK(trace_stack(beam, lossless).power_w == beam.power_w);
}

TEST_CASE("split propagations compose like a single one") {
  const AstigmaticBeam beam = nominal_beam(red_hl63603tg().ld);
  OpticalStack split;
  split.elements.push_back(Propagation{1.0, 0.3e-3});
  split.elements.push_back(Propagation{1.0, 0.7e-3});
  OpticalStack whole;
  whole.elements.push_back(Propagation{1.0, 1.0e-3});
  const AstigmaticBeam a = trace_stack(beam, split);
  const AstigmaticBeam b = trace_stack(beam, whole);
  CHECK(a.q1_m.real() == doctest::Approx(b.q1_m.real()).epsilon(1e-14));
  CHECK(a.q2_m.real() == doctest::Approx(b.q2_m.real()).epsilon(1e-14));
}

TEST_CASE("the ideal mirror never changes the traced beam") {
  for (const auto& preset : {blue_pl450b(), red_hl63603tg()}) {
    const LaserDiodeSpec& ld = preset.ld;
    const double pathway = ld.min_pathway_m * 1.5;
    const AstigmaticBeam beam = nominal_beam(ld);
    const AstigmaticBeam plain =
        trace_stack(beam, build_unit_stack(ld, pathway));
    const AstigmaticBeam mirrored = trace_stack(
        beam, build_unit_stack(ld, pathway, 1.54, 1.5, 0.25e-3, true));
    CHECK(mirrored.power_w == doctest::Approx(plain.power_w).epsilon(1e-15));
    CHECK(mirrored.q1_m.real() ==
          doctest::Approx(plain.q1_m.real()).epsilon(1e-13));
    CHECK(mirrored.q1_m.imag() ==
          doctest::Approx(plain.q1_m.imag()).epsilon(1e-13));
    CHECK(mirrored.q2_m.real() ==
          doctest::Approx(plain.q2_m.real()).epsilon(1e-13));
  }
}

TEST_CASE("medium mismatch is rejected") {
  const AstigmaticBeam beam = nominal_beam(blue_pl450b().ld);  // air
  OpticalStack glue_start;
  glue_start.source_index = 1.54;
  glue_start.elements.push_back(Propagation{1.54, 1e-3});
  CHECK_THROWS_AS(trace_stack(beam, glue_start), std::domain_error);

  OpticalStack inconsistent;  // propagation medium disagrees with the beam
  inconsistent.elements.push_back(Propagation{1.54, 1e-3});
  CHECK_THROWS_AS(trace_stack(beam, inconsistent), std::domain_error);
}

TEST_CASE("table presets carry the datasheet values") {
  const UnitPreset blue = blue_pl450b();
  CHECK(blue.ld.vacuum_wavelength_m == doctest::Approx(450e-9));
  CHECK(blue.ld.power_at_drive_w == doctest::Approx(88e-3));
  CHECK(blue.ld.theta_fwhm_1_rad.nominal ==
        doctest::Approx(7.5 * M_PI / 180.0));
  CHECK(blue.ld.theta_fwhm_2_rad.nominal ==
        doctest::Approx(21.5 * M_PI / 180.0));
  CHECK(blue.ld.can_window);
  CHECK(blue.requirement.min_power_w == doctest::Approx(100e-6));

  const UnitPreset red = red_hl63603tg();
  CHECK(red.ld.vacuum_wavelength_m == doctest::Approx(638e-9));
  CHECK(red.ld.power_at_drive_w == doctest::Approx(45e-3));
  CHECK_FALSE(red.ld.can_window);
  CHECK(red.ld.min_pathway_m == doctest::Approx(0.46e-3));
  CHECK(red.requirement.min_power_w == doctest::Approx(1e-3));

  CHECK(find_preset("blue-PL450B").has_value());
  CHECK(find_preset("red-HL63603TG").has_value());
  CHECK_FALSE(find_preset("green-unknown").has_value());
}
