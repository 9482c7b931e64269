#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "marketpalace/sim/config.hpp"
#include "marketpalace/sim/rng.hpp"
#include "marketpalace/sim/stats.hpp"

namespace marketpalace::sim {

// Simulated time runs on a grid of 2^-20 s. Periods, phases, add instants
// and link delays are rounded onto it. Every sum is exact in double
// precision: delay == residual + sum(route residuals) + hops * link.
inline constexpr double kTickSeconds = 0x1.0p-20;

struct TrialResult {
  double delay_s = 0;
  int hops = 0;
  double residual_timer_s = 0;           // sender's wait for its own timer
  std::vector<double> route_residuals_s;  // each intermediate node's wait
};

// Fully specified trial: who adds, who observes, all timer phases, and the
// add instant. Times in seconds from the common start.
struct TrialSetup {
  int source = 0;
  int observer = 1;
  std::vector<double> phases_s;
  double add_time_s = 0;
};

using NodeId = std::array<std::uint8_t, 32>;

// Network fixed by a config: node ids, neighbor sets and push targets
// (each node's k XOR-closest neighbors).
class Network {
 public:
  /// Throws Error(validation) for an invalid config.
  explicit Network(const SimConfig& config);

  int size() const noexcept { return static_cast<int>(ids_.size()); }
  const NodeId& id(int node) const { return ids_.at(static_cast<std::size_t>(node)); }
  const std::vector<int>& neighbors(int node) const { return neighbors_.at(static_cast<std::size_t>(node)); }
  const std::vector<int>& push_targets(int node) const { return targets_.at(static_cast<std::size_t>(node)); }
  /// The observer used by randomized trials: source's closest push target.
  int default_observer(int source) const;
  /// Push-hop distance, or nullopt if unreachable.
  std::optional<int> hop_distance(int from, int to) const;

 private:
  std::vector<NodeId> ids_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> targets_;
};

class Simulator {
 public:
  explicit Simulator(SimConfig config);

  const SimConfig& config() const noexcept { return config_; }
  const Network& network() const noexcept { return network_; }

  /// Random phases and add instant drawn from `rng`; source node 0 and the
  /// default observer. Throws Error(unreachable) if the observer cannot be
  /// reached.
  TrialResult run_trial(Rng& rng) const;
  /// Trial `index` of the experiment, using its own derived stream.
  TrialResult run_trial(int index) const;
  TrialResult run_trial_with(const TrialSetup& setup) const;

  /// Arrival time of the listing at every node (nullopt if never).
  std::vector<std::optional<double>> arrival_times(const TrialSetup& setup) const;

 private:
  SimConfig config_;
  Network network_;
  std::int64_t period_ticks_;
  std::int64_t link_ticks_;
};

struct ExperimentResult {
  StatsSummary summary;
  std::vector<double> delays;
  std::vector<TrialResult> trials;
};

ExperimentResult run_experiment(const SimConfig& config);

}  // namespace marketpalace::sim
