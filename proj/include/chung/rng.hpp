#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace chung {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the value at a counter depends only on
// (seed, stream, counter), so draws are reproducible regardless of the
// order in which workers consume them.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ ^ splitmix64(counter + 0x8cb92ba72f3d8dd7ULL));
  }

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on counters 2c and 2c+1.
  double normal(std::uint64_t counter) const {
    double u1 = uniform(2 * counter);
    double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n) by rejection on the top bits.
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t sub = 0;
    for (;;) {
      std::uint64_t v = splitmix64(bits(counter) + sub);
      if (v < limit) return v % n;
      ++sub;
    }
  }

 private:
  std::uint64_t key_;
};

// Sequential view over a CounterRng, for code that just wants "the next draw".
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform() { return rng_.uniform(counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  double normal() { return rng_.normal(counter_++); }
  std::uint64_t below(std::uint64_t n) { return rng_.below(counter_++, n); }
  long integer(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace chung
