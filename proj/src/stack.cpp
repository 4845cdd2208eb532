#include "dualbeam/stack.hpp"

#include <cmath>
#include <sstream>

namespace dualbeam {

Triple::Triple(double min_, double nominal_, double max_)
    : min(min_), nominal(nominal_), max(max_) {
  if (!(min <= nominal && nominal <= max)) {
    throw std::domain_error("triple must be ordered min <= nominal <= max");
  }
}

double OpticalStack::total_pathway_m() const {
  double total = 0.0;
  for (const auto& el : elements) {
    if (const auto* p = std::get_if<Propagation>(&el)) {
      total += p->distance_m;
    }
  }
  return total;
}

OpticalStack build_unit_stack(const LaserDiodeSpec& ld, double pathway_m,
                              double glue_index, double glass_index,
                              double window_thickness_m, bool include_mirror) {
  if (pathway_m < ld.min_pathway_m) {
    std::ostringstream msg;
    msg << "pathway " << pathway_m * 1e3 << " mm below the mechanical minimum "
        << ld.min_pathway_m * 1e3 << " mm for " << ld.label;
    throw ConstraintError(msg.str());
  }

  OpticalStack stack;
  stack.source_index = 1.0;

  double glue_length = pathway_m;
  if (ld.can_window) {
    if (pathway_m <= window_thickness_m) {
      std::ostringstream msg;
      msg << "pathway " << pathway_m * 1e3
          << " mm does not clear the can window (" << window_thickness_m * 1e3
          << " mm)";
      throw ConstraintError(msg.str());
    }
    stack.elements.push_back(FlatInterface{glass_index, true});
    stack.elements.push_back(Propagation{glass_index, window_thickness_m});
    stack.elements.push_back(FlatInterface{glue_index, true});
    glue_length = pathway_m - window_thickness_m;
  } else {
    stack.elements.push_back(FlatInterface{glue_index, true});
  }

  if (include_mirror) {
    const MirrorMode mode =
        ld.can_window ? MirrorMode::transmit : MirrorMode::reflect;
    stack.elements.push_back(Propagation{glue_index, glue_length / 2.0});
    stack.elements.push_back(IdealMirror{mode});
    stack.elements.push_back(Propagation{glue_index, glue_length / 2.0});
  } else {
    stack.elements.push_back(Propagation{glue_index, glue_length});
  }
  stack.elements.push_back(FlatInterface{1.5, true});  // fiber core
  return stack;
}

AstigmaticBeam trace_stack(const AstigmaticBeam& beam,
                           const OpticalStack& stack) {
  constexpr double kIndexTol = 1e-9;
  if (std::abs(beam.medium_index - stack.source_index) > kIndexTol) {
    throw std::domain_error("beam medium does not match the stack source medium");
  }
  AstigmaticBeam out = beam;
  for (const auto& el : stack.elements) {
    if (const auto* p = std::get_if<Propagation>(&el)) {
      if (std::abs(out.medium_index - p->medium_index) > kIndexTol) {
        throw std::domain_error(
            "propagation medium does not match the beam's current medium");
      }
      out = propagate(out, p->distance_m);
    } else if (const auto* f = std::get_if<FlatInterface>(&el)) {
      const double n_in = out.medium_index;
      out = refract_flat(out, f->n_to);
      if (f->apply_fresnel) {
        out.power_w *= fresnel_t(InterfacePair{n_in, f->n_to});
      }
    }
    // IdealMirror: lossless in both modes, no effect on q or power.
  }
  return out;
}

}  // namespace dualbeam
