#pragma once

#include <cstdint>

namespace geobern {

// splitmix64 generator. The standard <random> distributions are
// implementation-defined, so everything that needs reproducible draws
// (obstacle layouts, boundary sampling, randomized tests) goes through
// this class instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream derived from (seed, index). Streams with distinct
  // indices do not overlap for any practical draw count.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(index + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    return mix(z);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace geobern
