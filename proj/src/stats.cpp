#include "dualbeam/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dualbeam/rng.hpp"

namespace dualbeam {

namespace {

long count_in_range(const std::vector<double>& times, double lo, double hi) {
  // half-open [lo, hi)
  if (hi <= lo) return 0;
  const auto a = std::lower_bound(times.begin(), times.end(), lo);
  const auto b = std::lower_bound(times.begin(), times.end(), hi);
  return static_cast<long>(b - a);
}

double log_pmf(long i, double mu) {
  return -mu + static_cast<double>(i) * std::log(mu) -
         std::lgamma(static_cast<double>(i) + 1.0);
}

}  // namespace

SpikeTrain::SpikeTrain(std::vector<double> times, double session_start,
                       double session_end)
    : times_s(std::move(times)),
      session_start_s(session_start),
      session_end_s(session_end) {
  if (!(session_end_s > session_start_s)) {
    throw std::domain_error("session span must be non-empty");
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : times_s) {
    if (!(t > prev)) {
      throw std::domain_error("spike times must be strictly increasing");
    }
    if (t < session_start_s || t > session_end_s) {
      throw std::domain_error("spike time outside the session span");
    }
    prev = t;
  }
}

Psth psth(const SpikeTrain& spikes, std::span<const double> events_s,
          std::pair<double, double> window_s, double bin_s) {
  const auto [pre, post] = window_s;
  if (events_s.empty()) throw std::domain_error("PSTH needs at least one event");
  if (!(bin_s > 0.0)) throw std::domain_error("PSTH bin width must be > 0");
  if (!(pre > 0.0) || !(post > 0.0)) {
    throw std::domain_error("PSTH window spans must be > 0");
  }

  const long n_bins =
      std::max(1l, static_cast<long>(std::floor((pre + post) / bin_s + 1e-9)));
  Psth out;
  out.n_events = static_cast<long>(events_s.size());
  out.counts.assign(n_bins, 0);
  out.bin_edges_s.resize(n_bins + 1);
  for (long i = 0; i <= n_bins; ++i) {
    out.bin_edges_s[i] = -pre + static_cast<double>(i) * bin_s;
  }

  const double last_edge = out.bin_edges_s.back();
  for (double e : events_s) {
    if (e < spikes.session_start_s || e > spikes.session_end_s) {
      throw std::domain_error("event outside the session span");
    }
    auto it = std::lower_bound(spikes.times_s.begin(), spikes.times_s.end(),
                               e - pre);
    for (; it != spikes.times_s.end() && *it - e < last_edge; ++it) {
      const auto idx = static_cast<long>(std::floor((*it - e + pre) / bin_s));
      if (idx >= 0 && idx < n_bins) ++out.counts[idx];
    }
  }
  return out;
}

namespace {

struct PulseExposure {
  double t_in = 0.0;
  double t_out = 0.0;
  long in_count = 0;
  long out_count = 0;
};

PulseExposure pulse_exposure(const SpikeTrain& spikes, const PulseTrain& pulses,
                             std::pair<double, double> epoch_s) {
  const auto [a, b] = epoch_s;
  if (!(b > a)) throw std::domain_error("epoch must be non-empty");
  if (a < spikes.session_start_s || b > spikes.session_end_s) {
    throw std::domain_error("epoch outside the session span");
  }

  PulseExposure e;
  for (const Pulse& p : pulses.pulses) {
    const double lo = std::max(a, p.onset_s);
    const double hi = std::min(b, p.onset_s + p.duration_s);
    if (hi > lo) {
      e.t_in += hi - lo;
      e.in_count += count_in_range(spikes.times_s, lo, hi);
    }
  }
  e.t_out = (b - a) - e.t_in;
  if (!(e.t_in > 0.0)) throw std::domain_error("no in-pulse time within epoch");
  if (!(e.t_out > 0.0)) throw std::domain_error("no baseline time within epoch");
  e.out_count = count_in_range(spikes.times_s, a, b) - e.in_count;
  return e;
}

}  // namespace

RatesEta rates_and_eta(const SpikeTrain& spikes, const PulseTrain& pulses,
                       std::pair<double, double> epoch_s) {
  const PulseExposure e = pulse_exposure(spikes, pulses, epoch_s);
  const double r_in = static_cast<double>(e.in_count) / e.t_in;
  const double r_out = static_cast<double>(e.out_count) / e.t_out;
  const double denom = r_in + r_out;
  return RatesEta{r_in, r_out, denom > 0.0 ? (r_in - r_out) / denom : 0.0};
}

double poisson_lower_tail(long k, double mu) {
  if (k < 0) return 0.0;
  if (!(mu >= 0.0)) throw std::domain_error("Poisson mean must be >= 0");
  if (mu == 0.0) return 1.0;

  // Scale by the largest term in 0..k to stay in range for any mu.
  const long peak = std::min(k, static_cast<long>(std::floor(mu)));
  const double lp_peak = log_pmf(peak, mu);
  double sum = 1.0;
  double term = 1.0;
  for (long i = peak; i > 0; --i) {  // downward: t(i-1) = t(i) * i / mu
    term *= static_cast<double>(i) / mu;
    sum += term;
    if (term < sum * 1e-18) break;
  }
  term = 1.0;
  for (long i = peak + 1; i <= k; ++i) {  // upward: t(i) = t(i-1) * mu / i
    term *= mu / static_cast<double>(i);
    sum += term;
    if (term < sum * 1e-18 && static_cast<double>(i) > mu) break;
  }
  return std::min(1.0, std::exp(lp_peak) * sum);
}

double poisson_upper_tail(long k, double mu) {
  if (k <= 0) return 1.0;
  if (!(mu >= 0.0)) throw std::domain_error("Poisson mean must be >= 0");
  if (mu == 0.0) return 0.0;

  if (static_cast<double>(k) <= mu) {
    return std::min(1.0, 1.0 - poisson_lower_tail(k - 1, mu));
  }
  // k above the mean: the tail series decays geometrically.
  const double lp_k = log_pmf(k, mu);
  double sum = 1.0;
  double term = 1.0;
  for (long i = k + 1;; ++i) {
    term *= mu / static_cast<double>(i);
    sum += term;
    if (term < sum * 1e-18) break;
    if (i > k + 1000000) break;
  }
  return std::min(1.0, std::exp(lp_k) * sum);
}

TagResult poisson_tag(const SpikeTrain& spikes, const PulseTrain& pulses,
                      std::pair<double, double> epoch_s, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::domain_error("alpha must lie in (0, 0.5)");
  }
  const PulseExposure e = pulse_exposure(spikes, pulses, epoch_s);
  const double r_in = static_cast<double>(e.in_count) / e.t_in;
  const double r_out = static_cast<double>(e.out_count) / e.t_out;
  const double denom = r_in + r_out;
  const double eta = denom > 0.0 ? (r_in - r_out) / denom : 0.0;

  const long k = e.in_count;
  const double mu = r_out * e.t_in;

  TagResult result{TagClass::untagged, 1.0, r_in, r_out, eta};
  if (mu == 0.0 && k == 0) {
    return result;  // no evidence either way
  }
  const double p_upper = poisson_upper_tail(k, mu);
  const double p_lower = poisson_lower_tail(k, mu);
  result.p_value = std::min(p_upper, p_lower);
  if (p_upper < alpha) {
    result.klass = TagClass::activated;
  } else if (p_lower < alpha) {
    result.klass = TagClass::silenced;
  }
  return result;
}

Validity validity_filter(double r_baseline_hz, double threshold_hz) {
  if (!(r_baseline_hz >= 0.0)) {
    throw std::domain_error("baseline rate must be >= 0");
  }
  return r_baseline_hz > threshold_hz ? Validity::accepted : Validity::rejected;
}

long min_pulse_count(double baseline_rate_hz, double pulse_duration_s,
                     double required_expected_events) {
  if (!(baseline_rate_hz > 0.0) || !(pulse_duration_s > 0.0) ||
      !(required_expected_events > 0.0)) {
    throw std::domain_error("min_pulse_count needs positive inputs");
  }
  const double exact =
      required_expected_events / (baseline_rate_hz * pulse_duration_s);
  // Absolute 1e-9 snap so float noise cannot bump an exact integer result.
  return std::max(1l, static_cast<long>(std::ceil(exact - 1e-9)));
}

SpikeTrain synth_unit(std::uint64_t seed, double baseline_rate_hz,
                      const PulseTrain& pulses, double in_pulse_gain,
                      std::pair<double, double> epoch_s) {
  const auto [a, b] = epoch_s;
  if (!(b > a)) throw std::domain_error("epoch must be non-empty");
  if (!(baseline_rate_hz >= 0.0) || !(in_pulse_gain >= 0.0)) {
    throw std::domain_error("rates and gain must be >= 0");
  }

  // Piecewise-constant rate segments across the epoch.
  struct Segment {
    double start, end, rate;
  };
  std::vector<Segment> segments;
  double cursor = a;
  for (const Pulse& p : pulses.pulses) {
    const double lo = std::max(a, p.onset_s);
    const double hi = std::min(b, p.onset_s + p.duration_s);
    if (hi <= lo) continue;
    if (lo > cursor) segments.push_back({cursor, lo, baseline_rate_hz});
    segments.push_back({lo, hi, baseline_rate_hz * in_pulse_gain});
    cursor = hi;
  }
  if (cursor < b) segments.push_back({cursor, b, baseline_rate_hz});

  Substream rng(seed, 0);
  std::vector<double> times;
  for (const Segment& seg : segments) {
    if (seg.rate <= 0.0) continue;
    double t = seg.start + rng.exponential(seg.rate);
    while (t < seg.end) {
      times.push_back(t);
      t += rng.exponential(seg.rate);
    }
  }
  return SpikeTrain(std::move(times), a, b);
}

std::vector<double> read_spike_times(std::istream& is) {
  std::vector<double> times;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    const double t = std::stod(line, &pos);
    times.push_back(t);
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::runtime_error("spike file must be sorted ascending");
  }
  return times;
}

void write_psth_csv(const Psth& p, std::ostream& os) {
  os << "bin_start_s,bin_end_s,count,rate_hz\n";
  char buf[160];
  for (std::size_t i = 0; i < p.counts.size(); ++i) {
    const double width = p.bin_edges_s[i + 1] - p.bin_edges_s[i];
    const double rate = static_cast<double>(p.counts[i]) /
                        (static_cast<double>(p.n_events) * width);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%ld,%.12g\n", p.bin_edges_s[i],
                  p.bin_edges_s[i + 1], p.counts[i], rate);
    os << buf;
  }
}

}  // namespace dualbeam
