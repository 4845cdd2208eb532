#include "dualbeam/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dualbeam {

namespace {

void check_amplitude(double amplitude_ma) {
  if (!(amplitude_ma >= 0.0) || !std::isfinite(amplitude_ma)) {
    throw std::domain_error("pulse amplitude must be finite and >= 0");
  }
  if (amplitude_ma > kMaxAmplitudeMa) {
    std::ostringstream msg;
    msg << "amplitude " << amplitude_ma << " mA exceeds the " << kMaxAmplitudeMa
        << " mA drive cap";
    throw SafetyCapError(msg.str());
  }
}

}  // namespace

PulseTrain::PulseTrain(std::vector<Pulse> pulses_, double total_span_s_)
    : pulses(std::move(pulses_)), total_span_s(total_span_s_) {
  if (!(total_span_s > 0.0)) {
    throw std::domain_error("train span must be > 0");
  }
  double prev_onset = -std::numeric_limits<double>::infinity();
  double prev_end = -std::numeric_limits<double>::infinity();
  for (const Pulse& p : pulses) {
    if (!(p.duration_s > 0.0)) {
      throw std::domain_error("pulse durations must be > 0");
    }
    check_amplitude(p.amplitude_ma);
    if (!(p.onset_s > prev_onset)) {
      throw std::domain_error("pulse onsets must be strictly increasing");
    }
    // Touching pulses are fine; tolerate last-ulp noise from onset arithmetic.
    const double slack = 1e-9 * std::max(1.0, std::abs(prev_end));
    if (prev_end > -1e300 && p.onset_s < prev_end - slack) {
      throw std::domain_error("pulses must not overlap");
    }
    prev_onset = p.onset_s;
    prev_end = std::max(prev_end, p.onset_s + p.duration_s);
  }
  if (!pulses.empty() && prev_end > total_span_s * (1.0 + 1e-12)) {
    throw std::domain_error("train span does not cover the last pulse");
  }
}

double PulseTrain::on_time_s() const {
  double on = 0.0;
  for (const Pulse& p : pulses) on += p.duration_s;
  return on;
}

PulseTrain square_train(double period_s, double duty, double amplitude_ma,
                        int n_cycles) {
  if (!(period_s > 0.0)) throw std::domain_error("period must be > 0");
  if (!(duty > 0.0 && duty <= 1.0)) {
    throw std::domain_error("duty must lie in (0, 1]");
  }
  if (n_cycles < 1) throw std::domain_error("need at least one cycle");
  check_amplitude(amplitude_ma);

  std::vector<Pulse> pulses;
  pulses.reserve(n_cycles);
  for (int k = 0; k < n_cycles; ++k) {
    pulses.push_back({k * period_s, duty * period_s, amplitude_ma});
  }
  return PulseTrain(std::move(pulses), n_cycles * period_s);
}

std::vector<double> intensity_ladder(double i_max_ma,
                                     std::span<const double> multiples) {
  if (!(i_max_ma > 0.0)) throw std::domain_error("I_max must be > 0");
  if (multiples.empty()) throw std::domain_error("ladder needs multiples");

  std::vector<double> rungs;
  rungs.reserve(multiples.size());
  std::string offenders;
  for (double m : multiples) {
    if (!(m > 0.0)) throw std::domain_error("ladder multiples must be > 0");
    const double rung = i_max_ma * m;
    if (rung > kMaxAmplitudeMa) {
      if (!offenders.empty()) offenders += ", ";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g mA", rung);
      offenders += buf;
    }
    rungs.push_back(rung);
  }
  if (!offenders.empty()) {
    throw SafetyCapError("ladder rungs exceed the " +
                         std::to_string(static_cast<int>(kMaxAmplitudeMa)) +
                         " mA cap: " + offenders);
  }
  std::sort(rungs.begin(), rungs.end());
  return rungs;
}

PulseTrain chirp_train(const ChirpSpec& spec) {
  if (!(spec.f0_hz >= 0.0 && spec.f_end_hz >= spec.f0_hz)) {
    throw std::domain_error("chirp needs 0 <= f0 <= f_end");
  }
  if (spec.f0_hz == 0.0 && spec.f_end_hz == 0.0) {
    throw std::domain_error("chirp with f0 = f_end = 0 has no cycles");
  }
  if (!(spec.duration_s > 0.0)) throw std::domain_error("duration must be > 0");
  if (!(spec.duty > 0.0 && spec.duty < 1.0)) {
    throw std::domain_error("chirp duty must lie in (0, 1)");
  }
  check_amplitude(spec.amplitude_ma);

  const double T = spec.duration_s;
  const double beta = (spec.f_end_hz - spec.f0_hz) / T;  // Hz per second
  // Completed-cycle count c(t) = f0*t + beta*t^2/2; invert for a target count.
  const auto time_of = [&](double c) {
    return 2.0 * c / (spec.f0_hz + std::sqrt(spec.f0_hz * spec.f0_hz +
                                             2.0 * beta * c));
  };
  const double total_cycles = (spec.f0_hz + spec.f_end_hz) * T / 2.0;
  const auto n_starts = static_cast<long>(std::ceil(total_cycles - 1e-9));

  std::vector<Pulse> pulses;
  pulses.reserve(static_cast<std::size_t>(n_starts));
  for (long m = 0; m < n_starts; ++m) {
    const double t_on = m == 0 ? 0.0 : time_of(static_cast<double>(m));
    const double c_off = static_cast<double>(m) + spec.duty;
    const double t_off = c_off >= total_cycles ? T : time_of(c_off);
    if (t_off - t_on > 1e-12) {
      pulses.push_back({t_on, t_off - t_on, spec.amplitude_ma});
    }
  }
  return PulseTrain(std::move(pulses), T);
}

std::vector<float> render(const PulseTrain& train, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw std::domain_error("sample rate must be > 0");

  const auto index_of = [&](double t) {
    return static_cast<long>(std::floor(t * sample_rate_hz));
  };
  long length = index_of(train.total_span_s);
  for (const Pulse& p : train.pulses) {
    length = std::max(length, index_of(p.onset_s + p.duration_s));
  }

  std::vector<float> samples(static_cast<std::size_t>(length), 0.0f);
  for (const Pulse& p : train.pulses) {
    const long i0 = std::max(0l, index_of(p.onset_s));
    const long i1 = std::min(length, index_of(p.onset_s + p.duration_s));
    std::fill(samples.begin() + i0, samples.begin() + i1,
              static_cast<float>(p.amplitude_ma));
  }
  return samples;
}

double duty_cycle_of(const PulseTrain& train,
                     std::pair<double, double> window_s) {
  const auto [a, b] = window_s;
  if (!(b > a)) throw std::domain_error("duty-cycle window must be non-empty");
  double on = 0.0;
  for (const Pulse& p : train.pulses) {
    const double lo = std::max(a, p.onset_s);
    const double hi = std::min(b, p.onset_s + p.duration_s);
    if (hi > lo) on += hi - lo;
  }
  return on / (b - a);
}

void write_train_csv(const PulseTrain& train, std::ostream& os) {
  os << "onset_s,duration_s,amplitude_mA\n";
  char buf[128];
  for (const Pulse& p : train.pulses) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", p.onset_s,
                  p.duration_s, p.amplitude_ma);
    os << buf;
  }
}

PulseTrain read_train_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) ||
      line.find("onset_s,duration_s,amplitude_mA") != 0) {
    throw std::runtime_error(
        "train CSV must start with header onset_s,duration_s,amplitude_mA");
  }
  std::vector<Pulse> pulses;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Pulse p{};
    char trailing = '\0';
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &p.onset_s, &p.duration_s,
                    &p.amplitude_ma, &trailing) < 3) {
      throw std::runtime_error("malformed train CSV row: " + line);
    }
    pulses.push_back(p);
  }
  if (pulses.empty()) throw std::runtime_error("train CSV has no pulses");
  const double span = pulses.back().onset_s + pulses.back().duration_s;
  return PulseTrain(std::move(pulses), span);
}

void write_render_raw(std::span<const float> samples, std::ostream& os) {
  for (float s : samples) {
    std::uint32_t bits;
    static_assert(sizeof bits == sizeof s);
    std::memcpy(&bits, &s, sizeof bits);
    const char bytes[4] = {
        static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
        static_cast<char>((bits >> 16) & 0xFF),
        static_cast<char>((bits >> 24) & 0xFF)};
    os.write(bytes, 4);
  }
}

void write_render_csv(std::span<const float> samples, std::ostream& os) {
  os << "amplitude_mA\n";
  char buf[64];
  for (float s : samples) {
    std::snprintf(buf, sizeof buf, "%.9g\n", static_cast<double>(s));
    os << buf;
  }
}

}  // namespace dualbeam
