// dualbeam: design and analysis CLI for dual-color fiber-coupled stimulation
// units. Subcommands cover coupling curves, inverse pathway design, tolerance
// sweeps, illumination overlap, stimulation protocols, and spike tagging.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualbeam/presets.hpp"
#include "dualbeam/profile.hpp"
#include "dualbeam/protocol.hpp"
#include "dualbeam/scenario.hpp"
#include "dualbeam/solver.hpp"
#include "dualbeam/stats.hpp"

namespace {

using dualbeam::ResolvedScenario;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitSafety = 5;

// Scenario flags shared by the model-driven subcommands. Flags overlay the
// scenario file, which overlays the defaults; everything funnels through one
// schema validation.
struct ScenarioArgs {
  std::string scenario_path;
  std::string preset;
  std::optional<double> min_power_mw;
  std::optional<double> pathway_mm;
  std::optional<double> dx_um, dy_um;
  std::optional<double> na;
  std::optional<double> rel_tol;
  std::string divergence;
  std::optional<std::uint64_t> seed;
  int jobs = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path,
                    "Scenario JSON file (strict schema)");
    cmd->add_option("--preset", preset,
                    "Built-in source preset: blue-PL450B | red-HL63603TG");
    cmd->add_option("--min-power-mw", min_power_mw,
                    "Required power at the fiber tip, mW");
    cmd->add_option("--pathway-mm", pathway_mm, "Source-to-fiber pathway, mm");
    cmd->add_option("--dx-um", dx_um, "Core offset from the beam axis, um");
    cmd->add_option("--dy-um", dy_um, "Core offset from the beam axis, um");
    cmd->add_option("--na", na, "Clip by fiber acceptance NA (off by default)");
    cmd->add_option("--rel-tol", rel_tol, "Coupling quadrature tolerance");
    cmd->add_option("--divergence", divergence,
                    "Divergence choice: min | nominal | max");
    cmd->add_option("--seed", seed, "Random seed (DUALBEAM_SEED as fallback)");
    cmd->add_option("--jobs", jobs, "Worker threads for sweeps")
        ->check(CLI::Range(1, 256));
  }

  ResolvedScenario resolve() const {
    json doc = json::object();
    if (!scenario_path.empty()) {
      std::ifstream in(scenario_path);
      if (!in) {
        throw dualbeam::SchemaError("cannot open scenario file " +
                                    scenario_path);
      }
      try {
        in >> doc;
      } catch (const json::parse_error& e) {
        throw dualbeam::SchemaError(std::string("scenario JSON: ") + e.what());
      }
    }
    if (!preset.empty()) {
      doc["preset"] = preset;
      doc.erase("ld");
    }
    if (!doc.contains("preset") && !doc.contains("ld")) {
      doc["preset"] = "blue-PL450B";
    }
    if (min_power_mw) doc["requirement"]["min_power_mw"] = *min_power_mw;
    if (pathway_mm) doc["pathway_mm"] = *pathway_mm;
    if (dx_um) doc["offset_um"]["dx"] = *dx_um;
    if (dy_um) doc["offset_um"]["dy"] = *dy_um;
    if (na) doc["fiber"]["acceptance_na"] = *na;
    if (rel_tol) doc["rel_tol"] = *rel_tol;
    if (!divergence.empty()) doc["divergence_choice"] = divergence;
    if (seed) {
      doc["seed"] = *seed;
    } else if (!doc.contains("seed")) {
      if (const char* env = std::getenv("DUALBEAM_SEED")) {
        doc["seed"] = std::stoull(env);
      }
    }
    return dualbeam::resolve_scenario(doc);
  }
};

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

double required_pathway(const ResolvedScenario& rs) {
  if (!rs.pathway_m) {
    throw dualbeam::SchemaError(
        "this command needs --pathway-mm (or pathway_mm in the scenario)");
  }
  return *rs.pathway_m;
}

dualbeam::IntensityImage load_image(const std::string& path, double pitch_m) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image " + path);
  if (std::filesystem::path(path).extension() == ".pgm") {
    return dualbeam::read_pgm16(in, pitch_m);
  }
  return dualbeam::read_text_matrix(in, pitch_m);
}

int run(int argc, char** argv) {
  CLI::App app{
      "Dual-color fiber-coupled stimulation unit: coupling model, inverse "
      "design, tolerance analysis, protocols and tagging statistics"};
  app.require_subcommand(1);

  // ---- curve
  auto* curve_cmd =
      app.add_subcommand("curve", "Coupled power vs optical pathway (CSV)");
  ScenarioArgs curve_args;
  curve_args.attach(curve_cmd);
  double curve_from_mm = 0.0, curve_to_mm = 0.0;
  int curve_steps = 0;
  std::string curve_out;
  curve_cmd->add_option("--from-mm", curve_from_mm, "Curve start, mm");
  curve_cmd->add_option("--to-mm", curve_to_mm, "Curve end, mm");
  curve_cmd->add_option("--steps", curve_steps, "Number of curve points");
  curve_cmd->add_option("--out", curve_out, "Output CSV (default stdout)");

  // ---- pathway
  auto* pathway_cmd = app.add_subcommand(
      "pathway", "Longest pathway meeting the power requirement (JSON)");
  ScenarioArgs pathway_args;
  pathway_args.attach(pathway_cmd);
  std::string pathway_out;
  pathway_cmd->add_option("--out", pathway_out, "Output JSON (default stdout)");

  // ---- corners
  auto* corners_cmd = app.add_subcommand(
      "corners", "Coupled power at all datasheet-bound corners (JSON)");
  ScenarioArgs corners_args;
  corners_args.attach(corners_cmd);
  std::string corners_out;
  corners_cmd->add_option("--out", corners_out, "Output JSON (default stdout)");

  // ---- montecarlo
  auto* mc_cmd = app.add_subcommand(
      "montecarlo", "Monte Carlo tolerance analysis over datasheet ranges");
  ScenarioArgs mc_args;
  mc_args.attach(mc_cmd);
  std::optional<int> mc_n;
  std::string mc_out, mc_samples_csv;
  mc_cmd->add_option("--n", mc_n, "Number of draws (>= 100)");
  mc_cmd->add_option("--out", mc_out, "Output JSON (default stdout)");
  mc_cmd->add_option("--samples-csv", mc_samples_csv,
                     "Also write per-draw samples as CSV");

  // ---- overlap
  auto* overlap_cmd = app.add_subcommand(
      "overlap", "Illuminated-mask overlap (IoU) of two profile images");
  std::string img_a_path, img_b_path, mask_a_out, mask_b_out, overlap_out;
  std::string section_out;
  double pitch_um = 1.0, mask_k = 3.0;
  std::optional<double> noise_mean, noise_sd;
  std::string section_axis = "horizontal";
  std::optional<int> section_at;
  overlap_cmd->add_option("--image-a", img_a_path, "First image (PGM or text)")
      ->required();
  overlap_cmd->add_option("--image-b", img_b_path, "Second image (PGM or text)")
      ->required();
  overlap_cmd->add_option("--pitch-um", pitch_um, "Pixel pitch, um");
  overlap_cmd->add_option("--k", mask_k, "Threshold: mean + k*SD");
  overlap_cmd->add_option("--noise-mean", noise_mean,
                          "Noise mean (default: border-frame estimate)");
  overlap_cmd->add_option("--noise-sd", noise_sd, "Noise SD");
  overlap_cmd->add_option("--mask-a-out", mask_a_out, "Mask PGM for image A");
  overlap_cmd->add_option("--mask-b-out", mask_b_out, "Mask PGM for image B");
  overlap_cmd->add_option("--out", overlap_out, "Output JSON (default stdout)");
  overlap_cmd->add_option("--section-axis", section_axis,
                          "horizontal | vertical");
  overlap_cmd->add_option("--section-at", section_at,
                          "Row/column index for a cross-section CSV");
  overlap_cmd->add_option("--section-out", section_out,
                          "Cross-section CSV of image A");

  // ---- protocol
  auto* protocol_cmd =
      app.add_subcommand("protocol", "Stimulation waveform generation");
  protocol_cmd->require_subcommand(1);

  auto* square_cmd = protocol_cmd->add_subcommand("square", "Square pulse train");
  double sq_period = 3.0, sq_duty = 0.2, sq_ma = 100.0;
  int sq_cycles = 30;
  square_cmd->add_option("--period-s", sq_period, "Cycle period, s");
  square_cmd->add_option("--duty", sq_duty, "Duty cycle in (0, 1]");
  square_cmd->add_option("--ma", sq_ma, "Amplitude, mA (cap 100)");
  square_cmd->add_option("--cycles", sq_cycles, "Number of cycles");

  auto* chirp_cmd = protocol_cmd->add_subcommand("chirp", "Ascending chirp train");
  double ch_f0 = 0.0, ch_fend = 100.0, ch_dur = 20.0, ch_duty = 0.5,
         ch_ma = 100.0;
  chirp_cmd->add_option("--f0", ch_f0, "Start frequency, Hz");
  chirp_cmd->add_option("--fend", ch_fend, "End frequency, Hz");
  chirp_cmd->add_option("--duration-s", ch_dur, "Chirp duration, s");
  chirp_cmd->add_option("--duty", ch_duty, "Duty cycle in (0, 1)");
  chirp_cmd->add_option("--ma", ch_ma, "Amplitude, mA (cap 100)");

  auto* ladder_cmd =
      protocol_cmd->add_subcommand("ladder", "Intensity ladder of I_max multiples");
  double ladder_imax = 0.0;
  std::vector<double> ladder_multiples;
  ladder_cmd->add_option("--imax-ma", ladder_imax, "Base drive current, mA")
      ->required();
  ladder_cmd->add_option("--multiples", ladder_multiples,
                         "Ladder multiples (default 0.5 1 2 4)");

  std::string protocol_out, render_out, render_format = "raw";
  std::optional<double> render_hz;
  for (auto* cmd : {square_cmd, chirp_cmd, ladder_cmd}) {
    cmd->add_option("--out", protocol_out, "Output CSV (default stdout)");
  }
  for (auto* cmd : {square_cmd, chirp_cmd}) {
    cmd->add_option("--render", render_hz, "Also render samples at this rate, Hz");
    cmd->add_option("--render-out", render_out, "Rendered sample file");
    cmd->add_option("--render-format", render_format,
                    "raw (little-endian float32) | csv");
  }

  // ---- tag
  auto* tag_cmd = app.add_subcommand(
      "tag", "Optogenetic tagging test: spikes vs light pulses");
  std::string tag_spikes, tag_pulses, tag_out, psth_out;
  double tag_alpha = 0.01;
  std::optional<double> epoch_start, epoch_end;
  double psth_pre = 0.05, psth_post = 0.1, psth_bin = 0.01;
  tag_cmd->add_option("--spikes", tag_spikes,
                      "Spike times file, one float second per line")
      ->required();
  tag_cmd->add_option("--pulses", tag_pulses, "Pulse train CSV")->required();
  tag_cmd->add_option("--alpha", tag_alpha, "Significance level per tail");
  tag_cmd->add_option("--epoch-start", epoch_start,
                      "Analysis epoch start, s (default: session start)");
  tag_cmd->add_option("--epoch-end", epoch_end,
                      "Analysis epoch end, s (default: session end)");
  tag_cmd->add_option("--psth-pre", psth_pre, "PSTH span before onset, s");
  tag_cmd->add_option("--psth-post", psth_post, "PSTH span after onset, s");
  tag_cmd->add_option("--psth-bin", psth_bin, "PSTH bin width, s");
  tag_cmd->add_option("--out", tag_out, "Output JSON (default stdout)");
  tag_cmd->add_option("--psth-out", psth_out, "PSTH CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (curve_cmd->parsed()) {
    ResolvedScenario rs = curve_args.resolve();
    std::pair<double, double> range =
        rs.curve_range_m.value_or(std::make_pair(rs.ld.min_pathway_m, 20e-3));
    if (curve_cmd->count("--from-mm")) range.first = curve_from_mm * 1e-3;
    if (curve_cmd->count("--to-mm")) range.second = curve_to_mm * 1e-3;
    const int steps = curve_cmd->count("--steps") ? curve_steps : rs.curve_steps;
    const auto points = dualbeam::power_vs_pathway(rs.ld, rs.scenario, range,
                                                   steps, curve_args.jobs);
    std::string csv = "pathway_mm,power_mW\n";
    char buf[80];
    for (const auto& p : points) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", p.pathway_m * 1e3,
                    p.coupled_power_w * 1e3);
      csv += buf;
    }
    write_text(curve_out, csv);
    return 0;
  }

  if (pathway_cmd->parsed()) {
    ResolvedScenario rs = pathway_args.resolve();
    const auto result = dualbeam::max_pathway(rs.ld, rs.scenario, rs.requirement);
    json report{
        {"requirement",
         {{"label", rs.requirement.label},
          {"min_power_mw", rs.requirement.min_power_w * 1e3}}},
        {"coupled_power_mw", result.coupled_power_w * 1e3},
        {"margin_mw",
         (result.coupled_power_w - rs.requirement.min_power_w) * 1e3},
        {"scenario", dualbeam::scenario_to_json(rs)},
    };
    if (result.pathway_m) {
      report["pathway_mm"] = *result.pathway_m * 1e3;
      report["stack"] = dualbeam::stack_to_json(dualbeam::build_unit_stack(
          rs.ld, *result.pathway_m, rs.scenario.stack.glue_index,
          rs.scenario.stack.glass_index, rs.scenario.stack.window_thickness_m));
    } else {
      report["pathway_mm"] = nullptr;
      report["sentinel"] = ">100 mm";
    }
    write_text(pathway_out, dump_report(report));
    return 0;
  }

  if (corners_cmd->parsed()) {
    ResolvedScenario rs = corners_args.resolve();
    const auto sweep = dualbeam::corner_sweep(
        rs.ld, required_pathway(rs), rs.scenario.fiber, {rs.requirement},
        rs.scenario.stack, rs.scenario.rel_tol, corners_args.jobs);
    json corners = json::array();
    const auto level_name = [](dualbeam::LevelChoice c) {
      return c == dualbeam::LevelChoice::min       ? "min"
             : c == dualbeam::LevelChoice::nominal ? "nominal"
                                                   : "max";
    };
    for (const auto& c : sweep.corners) {
      corners.push_back({{"div1", level_name(c.div1)},
                         {"div2", level_name(c.div2)},
                         {"dx_um", c.dx_m * 1e6},
                         {"dy_um", c.dy_m * 1e6},
                         {"power_mw", c.coupled_power_w * 1e3}});
    }
    json margins = json::array();
    for (const auto& m : sweep.margins) {
      margins.push_back({{"label", m.requirement.label},
                         {"min_power_mw", m.requirement.min_power_w * 1e3},
                         {"worst_margin_mw", m.worst_margin_w * 1e3},
                         {"pass", m.pass}});
    }
    json report{{"pathway_mm", sweep.pathway_m * 1e3},
                {"corners", corners},
                {"worst_power_mw", sweep.worst_power_w * 1e3},
                {"best_power_mw", sweep.best_power_w * 1e3},
                {"margins", margins},
                {"scenario", dualbeam::scenario_to_json(rs)}};
    write_text(corners_out, dump_report(report));
    return 0;
  }

  if (mc_cmd->parsed()) {
    ResolvedScenario rs = mc_args.resolve();
    const int n = mc_n.value_or(rs.montecarlo_n);
    const auto mc = dualbeam::tolerance_monte_carlo(
        rs.ld, required_pathway(rs), rs.scenario.fiber, n, rs.seed,
        {rs.requirement}, rs.scenario.stack, rs.scenario.rel_tol, mc_args.jobs);
    json pass = json::array();
    for (const auto& p : mc.pass) {
      pass.push_back({{"label", p.requirement.label},
                      {"min_power_mw", p.requirement.min_power_w * 1e3},
                      {"probability", p.pass_probability}});
    }
    json report{{"n", mc.n},
                {"seed", mc.seed},
                {"pathway_mm", mc.pathway_m * 1e3},
                {"p5_mw", mc.p5_w * 1e3},
                {"p50_mw", mc.p50_w * 1e3},
                {"p95_mw", mc.p95_w * 1e3},
                {"min_mw", mc.min_w * 1e3},
                {"max_mw", mc.max_w * 1e3},
                {"pass", pass},
                {"scenario", dualbeam::scenario_to_json(rs)}};
    write_text(mc_out, dump_report(report));
    if (!mc_samples_csv.empty()) {
      std::string csv = "index,theta1_deg,theta2_deg,dx_um,dy_um,power_mW\n";
      char buf[160];
      constexpr double kDeg = M_PI / 180.0;
      for (std::size_t i = 0; i < mc.samples.size(); ++i) {
        const auto& s = mc.samples[i];
        std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", i,
                      s.theta1_rad / kDeg, s.theta2_rad / kDeg, s.dx_m * 1e6,
                      s.dy_m * 1e6, s.coupled_power_w * 1e3);
        csv += buf;
      }
      write_text(mc_samples_csv, csv);
    }
    return 0;
  }

  if (overlap_cmd->parsed()) {
    const double pitch_m = pitch_um * 1e-6;
    const auto img_a = load_image(img_a_path, pitch_m);
    const auto img_b = load_image(img_b_path, pitch_m);
    std::optional<dualbeam::NoiseStats> stats;
    if (noise_mean.has_value() != noise_sd.has_value()) {
      throw dualbeam::SchemaError(
          "--noise-mean and --noise-sd must be given together");
    }
    if (noise_mean) stats = dualbeam::NoiseStats{*noise_mean, *noise_sd};
    const auto mask_a = dualbeam::illuminated_mask(img_a, stats, mask_k);
    const auto mask_b = dualbeam::illuminated_mask(img_b, stats, mask_k);
    const double overlap = dualbeam::iou(mask_a, mask_b);
    json report{{"iou", overlap},
                {"a_pixels", mask_a.popcount()},
                {"b_pixels", mask_b.popcount()},
                {"k", mask_k}};
    write_text(overlap_out, dump_report(report));
    const auto write_mask = [](const dualbeam::BinaryMask& m,
                               const std::string& path) {
      if (path.empty()) return;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path);
      dualbeam::write_mask_pgm(m, out);
    };
    write_mask(mask_a, mask_a_out);
    write_mask(mask_b, mask_b_out);
    if (section_at) {
      const auto axis = section_axis == "vertical"
                            ? dualbeam::SectionAxis::vertical
                            : dualbeam::SectionAxis::horizontal;
      const auto section = dualbeam::cross_section(img_a, axis, *section_at);
      std::ostringstream os;
      dualbeam::write_section_csv(section, os);
      write_text(section_out, os.str());
    }
    return 0;
  }

  if (protocol_cmd->parsed()) {
    if (ladder_cmd->parsed()) {
      const auto rungs =
          ladder_multiples.empty()
              ? dualbeam::intensity_ladder(ladder_imax)
              : dualbeam::intensity_ladder(ladder_imax, ladder_multiples);
      std::string csv = "rung_mA\n";
      char buf[48];
      for (double r : rungs) {
        std::snprintf(buf, sizeof buf, "%.9g\n", r);
        csv += buf;
      }
      write_text(protocol_out, csv);
      return 0;
    }
    dualbeam::PulseTrain train =
        square_cmd->parsed()
            ? dualbeam::square_train(sq_period, sq_duty, sq_ma, sq_cycles)
            : dualbeam::chirp_train(
                  {ch_f0, ch_fend, ch_dur, ch_duty, ch_ma});
    std::ostringstream os;
    dualbeam::write_train_csv(train, os);
    write_text(protocol_out, os.str());
    if (render_hz) {
      const auto samples = dualbeam::render(train, *render_hz);
      std::ofstream out(render_out, std::ios::binary);
      if (render_out.empty() || !out) {
        throw std::runtime_error("--render needs a writable --render-out");
      }
      if (render_format == "raw") {
        dualbeam::write_render_raw(samples, out);
      } else if (render_format == "csv") {
        dualbeam::write_render_csv(samples, out);
      } else {
        throw dualbeam::SchemaError("--render-format must be raw or csv");
      }
    }
    return 0;
  }

  if (tag_cmd->parsed()) {
    std::ifstream spikes_in(tag_spikes);
    if (!spikes_in) throw std::runtime_error("cannot open " + tag_spikes);
    const auto times = dualbeam::read_spike_times(spikes_in);
    std::ifstream pulses_in(tag_pulses);
    if (!pulses_in) throw std::runtime_error("cannot open " + tag_pulses);
    const auto pulses = dualbeam::read_train_csv(pulses_in);

    const double last_pulse_end =
        pulses.pulses.back().onset_s + pulses.pulses.back().duration_s;
    const double start = epoch_start.value_or(
        std::min(times.empty() ? 0.0 : times.front(), pulses.pulses.front().onset_s));
    const double end = epoch_end.value_or(
        std::max(times.empty() ? last_pulse_end : times.back(), last_pulse_end));
    const dualbeam::SpikeTrain spikes(times, start, end);

    const auto tag = dualbeam::poisson_tag(spikes, pulses, {start, end}, tag_alpha);
    const char* klass = tag.klass == dualbeam::TagClass::activated ? "activated"
                        : tag.klass == dualbeam::TagClass::silenced
                            ? "silenced"
                            : "untagged";
    json report{{"class", klass},
                {"p_value", tag.p_value},
                {"r_in_hz", tag.r_in_hz},
                {"r_out_hz", tag.r_out_hz},
                {"eta", tag.eta},
                {"alpha", tag_alpha},
                {"epoch_s", {start, end}},
                {"n_pulses", pulses.pulses.size()},
                {"spikes_file", tag_spikes},
                {"pulses_file", tag_pulses}};
    write_text(tag_out, dump_report(report));

    if (!psth_out.empty()) {
      std::vector<double> onsets;
      onsets.reserve(pulses.pulses.size());
      for (const auto& p : pulses.pulses) onsets.push_back(p.onset_s);
      const auto hist =
          dualbeam::psth(spikes, onsets, {psth_pre, psth_post}, psth_bin);
      std::ostringstream os;
      dualbeam::write_psth_csv(hist, os);
      write_text(psth_out, os.str());
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dualbeam::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dualbeam::ConstraintError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const dualbeam::NoFeasibleDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const dualbeam::QuadratureError& e) {
    std::cerr << "error: " << e.what() << " (best estimate " << e.best_estimate
              << ", bound " << e.error_bound << ")\n";
    return kExitNumerical;
  } catch (const dualbeam::SafetyCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSafety;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
