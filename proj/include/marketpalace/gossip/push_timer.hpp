#pragma once

#include <cmath>
#include <cstdint>

namespace marketpalace::gossip {

inline constexpr double kDefaultPushPeriodSeconds = 90.0;
inline constexpr std::size_t kDefaultFanout = 20;

// Per-node push schedule: fires at phase + n * period, n = 0, 1, 2, ...
// measured from node start.
struct PushTimer {
  double period_s = kDefaultPushPeriodSeconds;
  double phase_s = 0.0;  // in [0, period_s)

  double fire_time(std::uint64_t n) const noexcept { return phase_s + static_cast<double>(n) * period_s; }

  /// First fire time >= t (t relative to node start).
  double next_fire_at_or_after(double t) const noexcept {
    if (t <= phase_s) return phase_s;
    double n = std::ceil((t - phase_s) / period_s);
    return phase_s + n * period_s;
  }
};

}  // namespace marketpalace::gossip
