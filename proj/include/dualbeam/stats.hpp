// Spike-response statistics around light pulses: PSTH, in/out firing rates and
// the normalized effect size, Poisson tagging, validity filtering, the
// minimum-pulse-count bound, and a synthetic unit generator used as the test
// oracle for all of the above.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "dualbeam/protocol.hpp"

namespace dualbeam {

struct SpikeTrain {
  std::vector<double> times_s;  // strictly increasing, within the session
  double session_start_s = 0.0;
  double session_end_s = 0.0;

  SpikeTrain() = default;
  SpikeTrain(std::vector<double> times, double session_start,
             double session_end);
};

struct Psth {
  std::vector<double> bin_edges_s;  // relative to event onset
  std::vector<long> counts;
  long n_events = 0;
};

/// Spike counts relative to each event onset; half-open bins [edge, next).
/// window = (pre, post) spans before/after the event, both > 0.
Psth psth(const SpikeTrain& spikes, std::span<const double> events_s,
          std::pair<double, double> window_s, double bin_s);

struct RatesEta {
  double r_in_hz;
  double r_out_hz;
  double eta;  // (r_in - r_out) / (r_in + r_out); 0 when both rates are 0
};

RatesEta rates_and_eta(const SpikeTrain& spikes, const PulseTrain& pulses,
                       std::pair<double, double> epoch_s);

enum class TagClass { activated, silenced, untagged };

struct TagResult {
  TagClass klass;
  double p_value;  // the smaller Poisson tail
  double r_in_hz;
  double r_out_hz;
  double eta;
};

/// Exact Poisson test of the in-pulse spike count against the rate expected
/// from the out-of-pulse baseline. Activated if P(X >= k) < alpha, silenced if
/// P(X <= k) < alpha (two one-sided tests).
TagResult poisson_tag(const SpikeTrain& spikes, const PulseTrain& pulses,
                      std::pair<double, double> epoch_s, double alpha = 0.01);

enum class Validity { accepted, rejected };

/// Units qualify for tagging statistics only above the baseline-rate
/// threshold (strict inequality).
Validity validity_filter(double r_baseline_hz, double threshold_hz = 0.01);

/// Pulses needed before absence-of-spikes is informative:
/// ceil(required_expected_events / (baseline_rate * pulse_duration)).
/// The default of 3 expected events reproduces the published figure for a
/// 0.01 spk/s unit and 50 ms pulses; the derivation is a reconstruction.
long min_pulse_count(double baseline_rate_hz, double pulse_duration_s,
                     double required_expected_events = 3.0);

/// Inhomogeneous Poisson spike generator: baseline rate outside pulses,
/// baseline * gain inside. Deterministic per seed.
SpikeTrain synth_unit(std::uint64_t seed, double baseline_rate_hz,
                      const PulseTrain& pulses, double in_pulse_gain,
                      std::pair<double, double> epoch_s);

// Exact Poisson tail probabilities (work in log space; stable through
// mu ~ 1e6). Exposed for the tagging test and its calibration fixtures.
double poisson_upper_tail(long k, double mu);  // P(X >= k)
double poisson_lower_tail(long k, double mu);  // P(X <= k)

// Spike file schema: one float time (seconds) per line, sorted ascending.
std::vector<double> read_spike_times(std::istream& is);
void write_psth_csv(const Psth& p, std::ostream& os);

}  // namespace dualbeam
