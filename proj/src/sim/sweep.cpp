#include "marketpalace/sim/sweep.hpp"

#include <charconv>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/sim/simulator.hpp"

namespace marketpalace::sim {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<SweepRow> sweep(const std::vector<SimConfig>& configs) {
  std::vector<SweepRow> rows;
  for (const auto& c : configs) {
    SweepRow row{c, std::nullopt, {}, {}};
    try {
      auto result = run_experiment(c);
      row.summary = result.summary;
      row.delays = std::move(result.delays);
    } catch (const Error& e) {
      row.error = std::string(to_string(e.code())) + ": " + e.detail();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "num_nodes,timer_period_s,k,seed,topology,link_delay_s,trials,n,mean_s,median_s,stddev_s,mode_s,p95_s,"
      "error\n";
  for (const auto& r : rows) {
    const auto& c = r.config;
    out += std::to_string(c.num_nodes) + "," + format_double(c.timer_period_s) + "," + std::to_string(c.k) + "," +
           std::to_string(c.seed) + "," + csv_field(c.topology.to_string()) + "," +
           format_double(c.link_delay_s) + "," + std::to_string(c.trials) + ",";
    if (r.summary) {
      const auto& s = *r.summary;
      out += std::to_string(s.n) + "," + format_double(s.mean_s) + "," + format_double(s.median_s) + "," +
             format_double(s.stddev_s) + "," + format_double(s.mode_s) + "," + format_double(s.p95_s) + ",";
    } else {
      out += ",,,,,,";
    }
    out += csv_field(r.error) + "\n";
  }
  return out;
}

std::string raw_delays(const std::vector<double>& delays) {
  std::string out;
  for (double d : delays) out += format_double(d) + "\n";
  return out;
}

std::vector<std::filesystem::path> write_sweep(const std::vector<SweepRow>& rows,
                                               const std::filesystem::path& csv_path) {
  write_file_atomic(csv_path, to_csv(rows));
  std::vector<std::filesystem::path> raw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto p = csv_path;
    p += rows.size() == 1 ? ".raw.txt" : ".raw." + std::to_string(i) + ".txt";
    write_file_atomic(p, raw_delays(rows[i].delays));
    raw.push_back(p);
  }
  return raw;
}

}  // namespace marketpalace::sim
