#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hypokit {

/// Seeded generator with a portable output stream: the engine is fixed
/// (mt19937_64) and the variate transforms are spelled out here rather than
/// delegated to std distributions, whose algorithms vary between libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * 3.14159265358979323846 * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Derives an independent child stream, e.g. one per field of a family.
  Rng split(std::uint64_t index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_hash_ & 0xffffffffu),
                      static_cast<std::uint32_t>(seed_hash_ >> 32),
                      static_cast<std::uint32_t>(index & 0xffffffffu),
                      static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return Rng((static_cast<std::uint64_t>(words[1]) << 32) | words[0]);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_hash_ = engine_();
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hypokit
