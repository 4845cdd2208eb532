#include "dualbeam/scenario.hpp"

#include <cmath>
#include <set>

namespace dualbeam {

namespace {

using nlohmann::json;

constexpr double kDeg = M_PI / 180.0;

void require_keys(const json& obj, const char* where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw SchemaError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw SchemaError("unknown key \"" + key + "\" in " + where);
    }
  }
}

double number_at(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw SchemaError("\"" + key + "\" must be a number");
  return v.get<double>();
}

Triple triple_at(const json& obj, const std::string& key, double unit) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    throw SchemaError("\"" + key + "\" must be [min, nominal, max]");
  }
  try {
    return Triple(v[0].get<double>() * unit, v[1].get<double>() * unit,
                  v[2].get<double>() * unit);
  } catch (const std::domain_error& e) {
    throw SchemaError("\"" + key + "\": " + e.what());
  }
}

LevelChoice level_from(const json& v, const char* where) {
  if (!v.is_string()) throw SchemaError(std::string(where) + " must be a string");
  const std::string s = v.get<std::string>();
  if (s == "min") return LevelChoice::min;
  if (s == "nominal") return LevelChoice::nominal;
  if (s == "max") return LevelChoice::max;
  throw SchemaError(std::string(where) + " must be min|nominal|max, got \"" + s +
                    "\"");
}

const char* level_name(LevelChoice c) {
  switch (c) {
    case LevelChoice::min: return "min";
    case LevelChoice::nominal: return "nominal";
    case LevelChoice::max: return "max";
  }
  return "?";
}

LaserDiodeSpec ld_from_json(const json& obj) {
  require_keys(obj, "ld", {"label", "wavelength_nm", "power_mw",
                           "theta1_fwhm_deg", "theta2_fwhm_deg",
                           "offset_bound_um", "can_window", "min_pathway_mm"});
  for (const char* key :
       {"label", "wavelength_nm", "power_mw", "theta1_fwhm_deg",
        "theta2_fwhm_deg", "offset_bound_um", "can_window", "min_pathway_mm"}) {
    if (!obj.contains(key)) {
      throw SchemaError(std::string("ld is missing \"") + key + "\"");
    }
  }
  if (!obj.at("label").is_string() || !obj.at("can_window").is_boolean()) {
    throw SchemaError("ld label must be a string and can_window a boolean");
  }
  LaserDiodeSpec ld{
      obj.at("label").get<std::string>(),
      number_at(obj, "wavelength_nm", 0.0) * 1e-9,
      number_at(obj, "power_mw", 0.0) * 1e-3,
      triple_at(obj, "theta1_fwhm_deg", kDeg),
      triple_at(obj, "theta2_fwhm_deg", kDeg),
      triple_at(obj, "offset_bound_um", 1e-6),
      obj.at("can_window").get<bool>(),
      number_at(obj, "min_pathway_mm", 0.0) * 1e-3,
  };
  if (!(ld.power_at_drive_w > 0.0) || !(ld.min_pathway_m > 0.0)) {
    throw SchemaError("ld power and minimum pathway must be > 0");
  }
  return ld;
}

}  // namespace

ResolvedScenario resolve_scenario(const json& doc) {
  require_keys(doc, "scenario document",
               {"preset", "ld", "fiber", "stack", "requirement",
                "divergence_choice", "offset_um", "rel_tol", "seed",
                "montecarlo", "pathway_mm", "curve"});

  ResolvedScenario rs;

  if (doc.contains("preset") && doc.contains("ld")) {
    throw SchemaError("give either \"preset\" or \"ld\", not both");
  }
  if (doc.contains("preset")) {
    const json& p = doc.at("preset");
    if (!p.is_string()) throw SchemaError("\"preset\" must be a string");
    const auto preset = find_preset(p.get<std::string>());
    if (!preset) {
      throw SchemaError("unknown preset \"" + p.get<std::string>() + "\"");
    }
    rs.ld = preset->ld;
    rs.requirement = preset->requirement;
  } else if (doc.contains("ld")) {
    rs.ld = ld_from_json(doc.at("ld"));
    rs.requirement = Requirement{"custom", 0.0};  // must be supplied below
  }

  if (doc.contains("requirement")) {
    const json& r = doc.at("requirement");
    require_keys(r, "requirement", {"label", "min_power_mw"});
    if (r.contains("label")) {
      if (!r.at("label").is_string()) {
        throw SchemaError("requirement label must be a string");
      }
      rs.requirement.label = r.at("label").get<std::string>();
    }
    rs.requirement.min_power_w =
        number_at(r, "min_power_mw", rs.requirement.min_power_w * 1e3) * 1e-3;
  }
  if (!(rs.requirement.min_power_w > 0.0)) {
    throw SchemaError("requirement min_power_mw must be > 0");
  }

  if (doc.contains("fiber")) {
    const json& f = doc.at("fiber");
    require_keys(f, "fiber", {"core_radius_um", "core_index", "acceptance_na"});
    rs.scenario.fiber.core_radius_m =
        number_at(f, "core_radius_um", 25.0) * 1e-6;
    rs.scenario.fiber.core_index = number_at(f, "core_index", 1.5);
    if (f.contains("acceptance_na") && !f.at("acceptance_na").is_null()) {
      rs.scenario.fiber.acceptance_na = number_at(f, "acceptance_na", 0.0);
    }
    if (!(rs.scenario.fiber.core_radius_m > 0.0)) {
      throw SchemaError("fiber core radius must be > 0");
    }
  }

  if (doc.contains("stack")) {
    const json& s = doc.at("stack");
    require_keys(s, "stack",
                 {"glue_index", "glass_index", "window_thickness_mm"});
    rs.scenario.stack.glue_index = number_at(s, "glue_index", 1.54);
    rs.scenario.stack.glass_index = number_at(s, "glass_index", 1.5);
    rs.scenario.stack.window_thickness_m =
        number_at(s, "window_thickness_mm", 0.25) * 1e-3;
  }

  if (doc.contains("divergence_choice")) {
    const json& d = doc.at("divergence_choice");
    if (d.is_string()) {
      rs.scenario.divergence_axis1 = level_from(d, "divergence_choice");
      rs.scenario.divergence_axis2 = rs.scenario.divergence_axis1;
    } else {
      require_keys(d, "divergence_choice", {"axis1", "axis2"});
      if (d.contains("axis1")) {
        rs.scenario.divergence_axis1 =
            level_from(d.at("axis1"), "divergence_choice.axis1");
      }
      if (d.contains("axis2")) {
        rs.scenario.divergence_axis2 =
            level_from(d.at("axis2"), "divergence_choice.axis2");
      }
    }
  }

  if (doc.contains("offset_um")) {
    const json& o = doc.at("offset_um");
    require_keys(o, "offset_um", {"dx", "dy"});
    rs.scenario.offset.dx_m = number_at(o, "dx", 0.0) * 1e-6;
    rs.scenario.offset.dy_m = number_at(o, "dy", 0.0) * 1e-6;
  }

  rs.scenario.rel_tol = number_at(doc, "rel_tol", 1e-6);
  if (!(rs.scenario.rel_tol > 1e-12 && rs.scenario.rel_tol < 1e-2)) {
    throw SchemaError("rel_tol must lie in (1e-12, 1e-2)");
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      throw SchemaError("\"seed\" must be an integer");
    }
    rs.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("montecarlo")) {
    const json& m = doc.at("montecarlo");
    require_keys(m, "montecarlo", {"n"});
    rs.montecarlo_n = static_cast<int>(number_at(m, "n", 1000));
    if (rs.montecarlo_n < 100) {
      throw SchemaError("montecarlo.n must be >= 100");
    }
  }

  if (doc.contains("pathway_mm")) {
    rs.pathway_m = number_at(doc, "pathway_mm", 0.0) * 1e-3;
  }

  if (doc.contains("curve")) {
    const json& c = doc.at("curve");
    require_keys(c, "curve", {"from_mm", "to_mm", "steps"});
    const double from = number_at(c, "from_mm", rs.ld.min_pathway_m * 1e3);
    const double to = number_at(c, "to_mm", 20.0);
    rs.curve_range_m = {from * 1e-3, to * 1e-3};
    rs.curve_steps = static_cast<int>(number_at(c, "steps", 50));
    if (rs.curve_steps < 2) throw SchemaError("curve.steps must be >= 2");
  }

  return rs;
}

json scenario_to_json(const ResolvedScenario& rs) {
  json ld{
      {"label", rs.ld.label},
      {"wavelength_nm", rs.ld.vacuum_wavelength_m * 1e9},
      {"power_mw", rs.ld.power_at_drive_w * 1e3},
      {"theta1_fwhm_deg",
       {rs.ld.theta_fwhm_1_rad.min / kDeg, rs.ld.theta_fwhm_1_rad.nominal / kDeg,
        rs.ld.theta_fwhm_1_rad.max / kDeg}},
      {"theta2_fwhm_deg",
       {rs.ld.theta_fwhm_2_rad.min / kDeg, rs.ld.theta_fwhm_2_rad.nominal / kDeg,
        rs.ld.theta_fwhm_2_rad.max / kDeg}},
      {"offset_bound_um",
       {rs.ld.offset_bound_m.min * 1e6, rs.ld.offset_bound_m.nominal * 1e6,
        rs.ld.offset_bound_m.max * 1e6}},
      {"can_window", rs.ld.can_window},
      {"min_pathway_mm", rs.ld.min_pathway_m * 1e3},
  };
  json fiber{{"core_radius_um", rs.scenario.fiber.core_radius_m * 1e6},
             {"core_index", rs.scenario.fiber.core_index}};
  if (rs.scenario.fiber.acceptance_na) {
    fiber["acceptance_na"] = *rs.scenario.fiber.acceptance_na;
  } else {
    fiber["acceptance_na"] = nullptr;
  }
  return json{
      {"ld", ld},
      {"fiber", fiber},
      {"stack",
       {{"glue_index", rs.scenario.stack.glue_index},
        {"glass_index", rs.scenario.stack.glass_index},
        {"window_thickness_mm", rs.scenario.stack.window_thickness_m * 1e3}}},
      {"requirement",
       {{"label", rs.requirement.label},
        {"min_power_mw", rs.requirement.min_power_w * 1e3}}},
      {"divergence_choice",
       {{"axis1", level_name(rs.scenario.divergence_axis1)},
        {"axis2", level_name(rs.scenario.divergence_axis2)}}},
      {"offset_um",
       {{"dx", rs.scenario.offset.dx_m * 1e6},
        {"dy", rs.scenario.offset.dy_m * 1e6}}},
      {"rel_tol", rs.scenario.rel_tol},
      {"seed", rs.seed},
  };
}

json stack_to_json(const OpticalStack& stack) {
  json elements = json::array();
  for (const auto& el : stack.elements) {
    if (const auto* p = std::get_if<Propagation>(&el)) {
      elements.push_back({{"type", "propagation"},
                          {"n", p->medium_index},
                          {"distance_mm", p->distance_m * 1e3}});
    } else if (const auto* f = std::get_if<FlatInterface>(&el)) {
      elements.push_back({{"type", "interface"},
                          {"n_to", f->n_to},
                          {"fresnel", f->apply_fresnel}});
    } else if (const auto* m = std::get_if<IdealMirror>(&el)) {
      elements.push_back(
          {{"type", "mirror"},
           {"mode", m->mode == MirrorMode::transmit ? "transmit" : "reflect"}});
    }
  }
  return json{{"source_index", stack.source_index},
              {"total_pathway_mm", stack.total_pathway_m() * 1e3},
              {"elements", elements}};
}

}  // namespace dualbeam
