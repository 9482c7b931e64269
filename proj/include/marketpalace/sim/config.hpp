#pragma once

#include <cstdint>
#include <string>

#include "marketpalace/common/canonical_json.hpp"

namespace marketpalace::sim {

enum class TopologyKind { complete, ring, random };

struct Topology {
  TopologyKind kind = TopologyKind::complete;
  int degree = 0;  // random only

  /// "complete", "ring" or "random(<degree>)".
  std::string to_string() const;
  /// Throws Error(validation) for anything else.
  static Topology parse(std::string_view text);

  friend bool operator==(const Topology&, const Topology&) = default;
};

struct SimConfig {
  int num_nodes = 4;
  double timer_period_s = 90.0;
  int k = 20;
  std::uint64_t seed = 42;
  Topology topology;
  double link_delay_s = 0.0;
  int trials = 100;

  /// Throws Error(validation) when a field is out of range.
  void validate() const;
  Json to_json() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

}  // namespace marketpalace::sim
