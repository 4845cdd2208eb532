// Layered optical pathway of a dual-color unit: laser diode source parameters
// and the ordered media/interface sequence a beam traverses on its way to the
// fiber face (LD -> optional can window -> index-matching glue -> dichroic
// mirror -> fiber).

#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dualbeam/beam.hpp"

namespace dualbeam {

// (min, nominal, max) parameter bound, ordered.
struct Triple {
  double min;
  double nominal;
  double max;

  Triple(double min_, double nominal_, double max_);
};

struct LaserDiodeSpec {
  std::string label;
  double vacuum_wavelength_m;
  double power_at_drive_w;      // total output at the modeled drive current
  Triple theta_fwhm_1_rad;      // divergence bounds, quoted in air
  Triple theta_fwhm_2_rad;
  Triple offset_bound_m;        // transverse alignment offset, per axis
  bool can_window;              // intact TO-can window in the pathway
  double min_pathway_m;         // mechanical lower bound on the pathway
};

struct Propagation {
  double medium_index;
  double distance_m;
};

struct FlatInterface {
  double n_to;
  bool apply_fresnel;
};

enum class MirrorMode { transmit, reflect };

// Lossless in both modes ("perfect dichroic mirror" idealization).
struct IdealMirror {
  MirrorMode mode;
};

using StackElement = std::variant<Propagation, FlatInterface, IdealMirror>;

struct OpticalStack {
  double source_index = 1.0;
  std::vector<StackElement> elements;

  // Sum of propagation lengths.
  double total_pathway_m() const;
};

class ConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical unit stack for a given diode and source-to-fiber pathway.
/// With a can window: air->glass, glass window, glass->glue, glue for the
/// remaining pathway, glue->fiber. Without: air->glue, glue, glue->fiber.
/// The window thickness counts toward the pathway. include_mirror splits the
/// glue run around an IdealMirror (transmit behind a window, reflect
/// otherwise); being lossless it never changes the traced beam.
/// Throws ConstraintError if pathway < ld.min_pathway_m.
OpticalStack build_unit_stack(const LaserDiodeSpec& ld, double pathway_m,
                              double glue_index = 1.54,
                              double glass_index = 1.5,
                              double window_thickness_m = 0.25e-3,
                              bool include_mirror = false);

/// Run a beam through the stack element by element; Fresnel transmission is
/// applied at each flagged interface. Returns the beam at the fiber face.
AstigmaticBeam trace_stack(const AstigmaticBeam& beam,
                           const OpticalStack& stack);

}  // namespace dualbeam
