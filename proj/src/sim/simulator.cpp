#include "marketpalace/sim/simulator.hpp"

#include <cmath>
#include <deque>
#include <queue>
#include <set>
#include <tuple>

#include "marketpalace/common/error.hpp"
#include "marketpalace/gossip/xor_metric.hpp"

namespace marketpalace::sim {
namespace {

enum class EventKind { listing_added = 0, delivery = 1, timer_fire = 2 };

struct Event {
  std::int64_t time = 0;
  int node = 0;
  EventKind kind = EventKind::listing_added;
  std::uint64_t seq = 0;
  int from = -1;

  bool operator>(const Event& o) const {
    return std::tie(time, node, kind, seq) > std::tie(o.time, o.node, o.kind, o.seq);
  }
};

std::int64_t to_ticks(double seconds) { return std::llround(seconds / kTickSeconds); }
double to_seconds(std::int64_t ticks) { return static_cast<double>(ticks) * kTickSeconds; }

struct Run {
  std::vector<std::optional<std::int64_t>> arrival;
  std::vector<std::int64_t> fired;
  std::vector<int> pred;
};

}  // namespace

Network::Network(const SimConfig& config) {
  config.validate();
  auto n = static_cast<std::size_t>(config.num_nodes);
  ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r(mix64(config.seed) ^ mix64(0x6e6f6465ull + i));
    for (std::size_t w = 0; w < 4; ++w) {
      std::uint64_t x = r.next();
      for (std::size_t b = 0; b < 8; ++b) ids_[i][w * 8 + b] = static_cast<std::uint8_t>(x >> (56 - 8 * b));
    }
  }
  std::vector<std::set<int>> adj(n);
  auto link = [&](int a, int b) {
    if (a == b) return;
    adj[static_cast<std::size_t>(a)].insert(b);
    adj[static_cast<std::size_t>(b)].insert(a);
  };
  int nodes = config.num_nodes;
  switch (config.topology.kind) {
    case TopologyKind::complete:
      for (int a = 0; a < nodes; ++a)
        for (int b = a + 1; b < nodes; ++b) link(a, b);
      break;
    case TopologyKind::ring:
      for (int a = 0; a < nodes; ++a) link(a, (a + 1) % nodes);
      break;
    case TopologyKind::random: {
      Rng r(mix64(config.seed ^ 0x746f706full));
      for (int a = 0; a < nodes; ++a) {
        std::vector<int> others;
        for (int b = 0; b < nodes; ++b)
          if (b != a) others.push_back(b);
        for (int c = 0; c < config.topology.degree; ++c) {
          auto pick = static_cast<std::size_t>(r.below(others.size()));
          link(a, others[pick]);
          others.erase(others.begin() + static_cast<std::ptrdiff_t>(pick));
        }
      }
      break;
    }
  }
  neighbors_.resize(n);
  targets_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors_[i].assign(adj[i].begin(), adj[i].end());
    targets_[i] = gossip::k_closest(neighbors_[i], ids_[i], static_cast<std::size_t>(config.k),
                                    [this](int j) { return ids_[static_cast<std::size_t>(j)]; });
  }
}

int Network::default_observer(int source) const {
  const auto& t = push_targets(source);
  if (t.empty()) throw Error(Errc::unreachable, "source has no push targets");
  return t.front();
}

std::optional<int> Network::hop_distance(int from, int to) const {
  std::vector<int> dist(ids_.size(), -1);
  std::deque<int> q{from};
  dist[static_cast<std::size_t>(from)] = 0;
  while (!q.empty()) {
    int a = q.front();
    q.pop_front();
    if (a == to) return dist[static_cast<std::size_t>(a)];
    for (int b : push_targets(a)) {
      if (dist[static_cast<std::size_t>(b)] < 0) {
        dist[static_cast<std::size_t>(b)] = dist[static_cast<std::size_t>(a)] + 1;
        q.push_back(b);
      }
    }
  }
  return std::nullopt;
}

Simulator::Simulator(SimConfig config)
    : config_(std::move(config)),
      network_(config_),
      period_ticks_(to_ticks(config_.timer_period_s)),
      link_ticks_(to_ticks(config_.link_delay_s)) {}

namespace {

Run simulate(const Network& net, std::int64_t period, std::int64_t link, int source,
             const std::vector<std::int64_t>& phases, std::int64_t add_time) {
  auto n = static_cast<std::size_t>(net.size());
  Run run{std::vector<std::optional<std::int64_t>>(n), std::vector<std::int64_t>(n, -1),
          std::vector<int>(n, -1)};
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  queue.push(Event{add_time, source, EventKind::listing_added, seq++, -1});

  auto next_fire = [&](int node, std::int64_t t) {
    std::int64_t phase = phases[static_cast<std::size_t>(node)];
    if (t <= phase) return phase;
    return phase + (t - phase + period - 1) / period * period;
  };

  while (!queue.empty()) {
    Event e = queue.top();
    queue.pop();
    auto i = static_cast<std::size_t>(e.node);
    switch (e.kind) {
      case EventKind::listing_added:
      case EventKind::delivery:
        if (run.arrival[i]) break;
        run.arrival[i] = e.time;
        run.pred[i] = e.from;
        queue.push(Event{next_fire(e.node, e.time), e.node, EventKind::timer_fire, seq++, -1});
        break;
      case EventKind::timer_fire:
        // One fire per node is enough: every target receives the listing
        // from this push, so later pushes carry nothing new for them.
        run.fired[i] = e.time;
        for (int target : net.push_targets(e.node)) {
          queue.push(Event{e.time + link, target, EventKind::delivery, seq++, e.node});
        }
        break;
    }
  }
  return run;
}

}  // namespace

std::vector<std::optional<double>> Simulator::arrival_times(const TrialSetup& setup) const {
  std::vector<std::int64_t> phases;
  for (double p : setup.phases_s) phases.push_back(to_ticks(p));
  if (phases.size() != static_cast<std::size_t>(network_.size())) {
    throw Error(Errc::validation, "one phase per node required");
  }
  Run run = simulate(network_, period_ticks_, link_ticks_, setup.source, phases, to_ticks(setup.add_time_s));
  std::vector<std::optional<double>> out;
  for (const auto& a : run.arrival) out.push_back(a ? std::optional(to_seconds(*a)) : std::nullopt);
  return out;
}

TrialResult Simulator::run_trial_with(const TrialSetup& setup) const {
  int n = network_.size();
  if (setup.source < 0 || setup.source >= n || setup.observer < 0 || setup.observer >= n ||
      setup.source == setup.observer) {
    throw Error(Errc::validation, "source and observer must be distinct nodes");
  }
  if (setup.phases_s.size() != static_cast<std::size_t>(n)) {
    throw Error(Errc::validation, "one phase per node required");
  }
  std::vector<std::int64_t> phases;
  for (double p : setup.phases_s) {
    std::int64_t t = to_ticks(p);
    if (t < 0 || t >= period_ticks_) throw Error(Errc::validation, "phases must lie in [0, period)");
    phases.push_back(t);
  }
  std::int64_t add = to_ticks(setup.add_time_s);
  Run run = simulate(network_, period_ticks_, link_ticks_, setup.source, phases, add);

  auto v = static_cast<std::size_t>(setup.observer);
  if (!run.arrival[v]) throw Error(Errc::unreachable, "observer is not reachable from the source");

  std::vector<int> path;
  for (int at = setup.observer; at != -1; at = run.pred[static_cast<std::size_t>(at)]) path.push_back(at);
  std::reverse(path.begin(), path.end());

  TrialResult r;
  r.hops = static_cast<int>(path.size()) - 1;
  r.delay_s = to_seconds(*run.arrival[v] - add);
  auto u = static_cast<std::size_t>(setup.source);
  r.residual_timer_s = to_seconds(run.fired[u] - *run.arrival[u]);
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    auto m = static_cast<std::size_t>(path[i]);
    r.route_residuals_s.push_back(to_seconds(run.fired[m] - *run.arrival[m]));
  }
  return r;
}

TrialResult Simulator::run_trial(Rng& rng) const {
  TrialSetup setup;
  setup.source = 0;
  setup.observer = network_.default_observer(0);
  for (int i = 0; i < network_.size(); ++i) {
    setup.phases_s.push_back(to_seconds(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(period_ticks_)))));
  }
  setup.add_time_s = to_seconds(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(period_ticks_))));
  return run_trial_with(setup);
}

TrialResult Simulator::run_trial(int index) const {
  Rng rng = Rng::for_trial(config_.seed, static_cast<std::uint64_t>(index));
  return run_trial(rng);
}

ExperimentResult run_experiment(const SimConfig& config) {
  Simulator sim(config);
  ExperimentResult out;
  out.trials.reserve(static_cast<std::size_t>(config.trials));
  for (int i = 0; i < config.trials; ++i) {
    out.trials.push_back(sim.run_trial(i));
    out.delays.push_back(out.trials.back().delay_s);
  }
  out.summary = summarize(out.delays);
  return out;
}

}  // namespace marketpalace::sim
