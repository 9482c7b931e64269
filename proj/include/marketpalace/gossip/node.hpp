#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/envelope.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/gossip/event_loop.hpp"
#include "marketpalace/gossip/peer.hpp"
#include "marketpalace/gossip/push_timer.hpp"
#include "marketpalace/gossip/transport.hpp"
#include "marketpalace/gossip/wire.hpp"
#include "marketpalace/gossip/worker_pool.hpp"
#include "marketpalace/market/listing_store.hpp"

namespace marketpalace::gossip {

struct Identity {
  crypto::PrivateKey key;
  crypto::CertifiedKey cert;
};

struct NodeOptions {
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;
  /// Host announced to peers; defaults to listen_host.
  std::string advertised_host;
  double period_s = kDefaultPushPeriodSeconds;
  /// Timer phase in [0, period_s); random when unset.
  std::optional<double> phase_s;
  std::size_t k = kDefaultFanout;
  int bootstrap_attempts = 3;
  Millis bootstrap_retry_delay{500};
  Millis connect_timeout{5000};
  Millis io_timeout{10000};
  std::size_t io_threads = 4;
};

/// Payload of hello and hello-ack.
struct Hello {
  crypto::CertifiedKey cert;
  std::string listen_addr;

  Json to_json() const;
  static Hello from_json(const Json& j);
};

Json push_payload(const market::StoreSnapshot& snapshot);
market::StoreSnapshot parse_push_payload(const Json& j);

struct OutgoingPush {
  PeerInfo peer;
  WireMessage message;
};

// One market node on the gossip network. Inbound connections must open with
// a hello carrying a server-certified key; everything that touches the peer
// table or the listing store runs on the node's event loop.
class Node {
 public:
  using SteadyTime = std::chrono::steady_clock::time_point;
  /// Called on the event loop for each listing newly installed from a push.
  using ListingObserver = std::function<void(const market::SignedListing&, SteadyTime received)>;
  /// Called on the event loop for each inbound envelope (not yet opened).
  using EnvelopeHandler = std::function<void(const crypto::Envelope&)>;

  Node(Identity identity, crypto::PublicKey server_key, market::ListingStore& store, const Clock& clock,
       NodeOptions options = {});
  ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  /// Binds the listener and starts the push timer. Throws Error(io) when
  /// the port is taken.
  void start();
  void stop();

  const PeerId& id() const noexcept { return id_; }
  const Identity& identity() const noexcept { return identity_; }
  /// host:port peers should dial. Valid after start().
  std::string address() const;
  double phase_s() const noexcept { return timer_.phase_s; }
  double period_s() const noexcept { return timer_.period_s; }
  SteadyTime started_at() const noexcept { return started_at_; }

  /// Joins through the given addresses. Returns the resulting peer count.
  /// Throws Error(bootstrap_failed) if none answered after all attempts.
  std::size_t bootstrap(const std::vector<std::string>& addresses);

  /// Expires the store and builds one push per peer in k_closest(self, k).
  std::vector<OutgoingPush> on_timer_fire();
  /// Runs a push round now and waits until every push finished.
  void fire_now();

  /// Merges a push from `sender`. Throws Error(bad_cert) if the sender's
  /// certificate does not verify, Error(parse) for a malformed payload.
  market::MergeReport handle_push(const Hello& sender, const Json& payload);

  /// Throws Error(not_found) for an unknown peer, Error(unreachable) if it
  /// cannot be reached within the connect timeout.
  void send_envelope(const PeerId& target, const crypto::Envelope& env);

  market::SignedListing add_listing(const market::ListingDraft& draft);
  market::Tombstone remove_listing(const market::ContentId& id);

  std::vector<PeerInfo> peers();
  std::optional<PeerInfo> peer(const PeerId& id);
  /// Adds a peer directly (already authenticated elsewhere).
  bool add_peer(const PeerInfo& info);

  void set_listing_observer(ListingObserver observer);
  void set_envelope_handler(EnvelopeHandler handler);

  EventLoop& loop() noexcept { return loop_; }
  market::ListingStore& store() noexcept { return store_; }

 private:
  struct Inbound {
    Socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  WireMessage hello_message() const;
  void schedule_fire(std::uint64_t n);
  void dispatch(std::vector<OutgoingPush> pushes);
  bool deliver(const OutgoingPush& push);
  market::MergeReport merge_push(const Hello& sender, const Json& payload);
  void accept_loop();
  void serve_connection(Inbound& conn);
  std::optional<WireMessage> handle_frame(const std::optional<Hello>& session, const WireMessage& msg);
  void reap_inbound(bool all);
  PeerInfo peer_from_hello(const Hello& h) const;

  Identity identity_;
  PeerId id_;
  crypto::PublicKey server_key_;
  market::ListingStore& store_;
  const Clock& clock_;
  NodeOptions options_;
  PushTimer timer_;
  PeerTable table_;

  EventLoop loop_;
  ConnectionPool pool_;
  WorkerPool workers_;
  std::unique_ptr<Listener> listener_;
  std::thread acceptor_;
  std::mutex inbound_mutex_;
  std::list<Inbound> inbound_;
  std::atomic<bool> running_{false};
  SteadyTime started_at_{};
  std::string address_;

  ListingObserver observer_;
  EnvelopeHandler envelope_handler_;
};

}  // namespace marketpalace::gossip
