#pragma once

#include <cstdint>

namespace marketpalace::sim {

// SplitMix64. Each trial gets its own stream seeded from (seed, trial), so a
// trial's outcome does not depend on which trials ran before it.
class Rng {
 public:
  explicit Rng(std::uint64_t state) noexcept : state_(state) {}
  static Rng for_trial(std::uint64_t seed, std::uint64_t trial) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform integer on [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace marketpalace::sim
