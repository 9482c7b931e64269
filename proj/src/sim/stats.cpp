#include "marketpalace/sim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "marketpalace/common/error.hpp"

namespace marketpalace::sim {

Json StatsSummary::to_json() const {
  return Json{{"mean_s", mean_s}, {"median_s", median_s}, {"mode_s", mode_s},
              {"n", n},           {"p95_s", p95_s},       {"stddev_s", stddev_s}};
}

StatsSummary summarize(std::span<const double> delays) {
  if (delays.empty()) throw Error(Errc::validation, "cannot summarize an empty sample");
  std::vector<double> sorted(delays.begin(), delays.end());
  std::sort(sorted.begin(), sorted.end());
  StatsSummary s;
  s.n = sorted.size();
  double n = static_cast<double>(s.n);
  s.mean_s = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  std::size_t mid = s.n / 2;
  s.median_s = s.n % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  if (s.n > 1) {
    double ss = 0;
    for (double x : sorted) ss += (x - s.mean_s) * (x - s.mean_s);
    s.stddev_s = std::sqrt(ss / (n - 1));
  }
  std::map<double, std::size_t> bins;
  for (double x : sorted) ++bins[std::floor(x)];
  std::size_t best = 0;
  for (const auto& [bin, count] : bins) {
    if (count > best) {
      best = count;
      s.mode_s = bin;
    }
  }
  auto rank = static_cast<std::size_t>(std::ceil(0.95 * n));
  s.p95_s = sorted[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

double ks_uniform(std::span<const double> sample, double lo, double hi) {
  if (sample.empty()) throw Error(Errc::validation, "empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = std::clamp((x[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::validation, "empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double nx = static_cast<double>(x.size());
  double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace marketpalace::sim
