// Stimulation current waveforms: square trains, intensity ladders, frequency
// chirps, sample-accurate rendering, and duty-cycle reporting.

#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dualbeam {

// Hard drive-current cap; exceeding it is an error, never a silent clamp.
inline constexpr double kMaxAmplitudeMa = 100.0;

class SafetyCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Pulse {
  double onset_s;
  double duration_s;
  double amplitude_ma;
};

struct PulseTrain {
  std::vector<Pulse> pulses;  // ordered, non-overlapping
  double total_span_s = 0.0;

  PulseTrain() = default;
  PulseTrain(std::vector<Pulse> pulses, double total_span_s);

  double on_time_s() const;
};

/// n_cycles constant-amplitude pulses at onsets k*period, each duty*period
/// long; span = n_cycles * period.
PulseTrain square_train(double period_s, double duty, double amplitude_ma,
                        int n_cycles);

inline constexpr double kDefaultLadder[] = {0.5, 1.0, 2.0, 4.0};

/// i_max scaled by each multiple, ascending. Any rung above the cap raises
/// SafetyCapError naming the offending rungs.
std::vector<double> intensity_ladder(
    double i_max_ma, std::span<const double> multiples = kDefaultLadder);

struct ChirpSpec {
  double f0_hz;
  double f_end_hz;
  double duration_s;
  double duty;
  double amplitude_ma;
};

/// Linear-frequency chirp as a pulse train: with phase
/// phi(t) = 2*pi*(f0*t + (f_end-f0)*t^2/(2*duration)), the output is ON
/// wherever frac(phi/2pi) < duty. Crossing times solve the quadratic phase in
/// closed form. Reduces to square_train at f0 = f_end.
PulseTrain chirp_train(const ChirpSpec& spec);

/// Sample-accurate render at the given rate. A pulse occupies the half-open
/// sample-index interval [floor(onset*fs), floor((onset+duration)*fs)); a
/// sample landing exactly on a pulse offset is OFF. Length covers the span
/// (floor(span*fs) samples) and always includes the last pulse.
std::vector<float> render(const PulseTrain& train, double sample_rate_hz);

/// ON time within the window divided by the window length.
double duty_cycle_of(const PulseTrain& train,
                     std::pair<double, double> window_s);

// Train file schema: CSV with header onset_s,duration_s,amplitude_mA.
void write_train_csv(const PulseTrain& train, std::ostream& os);
PulseTrain read_train_csv(std::istream& is);

// Rendered output: raw little-endian float32 or one sample per CSV row.
void write_render_raw(std::span<const float> samples, std::ostream& os);
void write_render_csv(std::span<const float> samples, std::ostream& os);

}  // namespace dualbeam
