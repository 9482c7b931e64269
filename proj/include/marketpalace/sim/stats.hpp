#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "marketpalace/common/canonical_json.hpp"

namespace marketpalace::sim {

struct StatsSummary {
  std::size_t n = 0;
  double mean_s = 0;
  double median_s = 0;
  double stddev_s = 0;  // sample (n - 1); 0 when n == 1
  double mode_s = 0;    // lower edge of the most populated 1 s bin
  double p95_s = 0;     // nearest rank

  Json to_json() const;
};

/// Throws Error(validation) for an empty list.
StatsSummary summarize(std::span<const double> delays);

/// Kolmogorov-Smirnov distance between the sample and uniform[lo, hi).
double ks_uniform(std::span<const double> sample, double lo, double hi);
/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic 1% critical value for the one-sample test.
double ks_critical_1pct(std::size_t n);

}  // namespace marketpalace::sim
