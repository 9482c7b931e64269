#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "marketpalace/sim/config.hpp"
#include "marketpalace/sim/stats.hpp"

namespace marketpalace::sim {

struct SweepRow {
  SimConfig config;
  std::optional<StatsSummary> summary;
  std::vector<double> delays;
  std::string error;  // set when the config failed
};

/// Runs every config; a failing config yields an error row.
std::vector<SweepRow> sweep(const std::vector<SimConfig>& configs);

/// Header plus one line per row. Columns: num_nodes, timer_period_s, k,
/// seed, topology, link_delay_s, trials, n, mean_s, median_s, stddev_s,
/// mode_s, p95_s, error.
std::string to_csv(const std::vector<SweepRow>& rows);
/// One delay per line.
std::string raw_delays(const std::vector<double>& delays);

/// Writes `csv_path` and the raw file(s) next to it; returns the raw paths.
std::vector<std::filesystem::path> write_sweep(const std::vector<SweepRow>& rows,
                                               const std::filesystem::path& csv_path);

/// Shortest text that round-trips the double.
std::string format_double(double v);

}  // namespace marketpalace::sim
