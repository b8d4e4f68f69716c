// Seeded, cross-platform-deterministic randomness. The engine is the
// standard mt19937_64 (its output sequence is pinned by the standard); the
// real-valued draws are hand-rolled because std distributions may differ
// between standard libraries.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ranconv {

/// splitmix64 finalizer; used to derive independent per-trial sub-seeds.
inline std::uint64_t mixSeed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t subSeed(std::uint64_t seed, std::uint64_t stream) {
  return mixSeed(seed ^ mixSeed(stream));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t nextU64() { return engine_(); }

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return nextU64() % n; }

  bool coin() { return (nextU64() & 1ull) != 0; }

  /// Standard normal via Box-Muller (pair cached).
  double gaussian() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // in (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    hasSpare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace ranconv
