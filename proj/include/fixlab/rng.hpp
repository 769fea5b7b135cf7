#pragma once

#include <cstdint>

namespace fixlab {

// splitmix64 stream. Sampled checks must reproduce bit-for-bit from
// (seed, sample count) alone, so <random> distributions (which vary across
// standard libraries) are not used anywhere in the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Independent stream for element `index` of a seeded sequence.
  /// Random access: element n is generated without generating 0..n-1.
  static Rng indexed(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed);
    const std::uint64_t base = mix.next_u64();
    Rng r(base ^ (index * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fixlab
