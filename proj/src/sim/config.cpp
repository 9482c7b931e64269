#include "marketpalace/sim/config.hpp"

#include <charconv>
#include <cmath>

#include "marketpalace/common/error.hpp"

namespace marketpalace::sim {

std::string Topology::to_string() const {
  switch (kind) {
    case TopologyKind::complete: return "complete";
    case TopologyKind::ring: return "ring";
    case TopologyKind::random: return "random(" + std::to_string(degree) + ")";
  }
  return "complete";
}

Topology Topology::parse(std::string_view text) {
  if (text == "complete") return {TopologyKind::complete, 0};
  if (text == "ring") return {TopologyKind::ring, 0};
  constexpr std::string_view prefix = "random(";
  if (text.starts_with(prefix) && text.ends_with(")")) {
    auto digits = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    int degree = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), degree);
    if (ec == std::errc{} && end == digits.data() + digits.size() && !digits.empty()) {
      return {TopologyKind::random, degree};
    }
  }
  throw Error(Errc::validation, "unknown topology '" + std::string(text) + "'");
}

void SimConfig::validate() const {
  if (num_nodes < 2) throw Error(Errc::validation, "num_nodes must be at least 2");
  if (!std::isfinite(timer_period_s) || timer_period_s <= 0) {
    throw Error(Errc::validation, "timer_period_s must be positive");
  }
  if (std::llround(timer_period_s * 0x1.0p20) < 1) throw Error(Errc::validation, "timer_period_s too small");
  if (k < 1) throw Error(Errc::validation, "k must be at least 1");
  if (!std::isfinite(link_delay_s) || link_delay_s < 0) {
    throw Error(Errc::validation, "link_delay_s must be non-negative");
  }
  if (trials < 1) throw Error(Errc::validation, "trials must be at least 1");
  if (topology.kind == TopologyKind::random && (topology.degree < 1 || topology.degree > num_nodes - 1)) {
    throw Error(Errc::validation, "random topology degree must lie in [1, num_nodes - 1]");
  }
}

Json SimConfig::to_json() const {
  return Json{{"k", k},
              {"link_delay_s", link_delay_s},
              {"num_nodes", num_nodes},
              {"seed", seed},
              {"timer_period_s", timer_period_s},
              {"topology", topology.to_string()},
              {"trials", trials}};
}

}  // namespace marketpalace::sim
