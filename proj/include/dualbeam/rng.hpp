// Deterministic per-draw random substreams. Each draw index gets its own
// engine derived from (seed, index), so sweep results are bitwise identical
// regardless of execution order or thread count.

#pragma once

#include <cstdint>
#include <random>

namespace dualbeam {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t index)
      : eng_(splitmix64(splitmix64(seed) ^ splitmix64(index + 1))) {}

  // Uniform on [0, 1); 53-bit mantissa, platform-independent.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with the given rate; guards against log(0).
  double exponential(double rate) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace dualbeam
