#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/gossip/node.hpp"
#include "marketpalace/market/listing_store.hpp"
#include "marketpalace/market/messages.hpp"
#include "marketpalace/node/config.hpp"

namespace httplib {
class Server;
}

namespace marketpalace::node {

struct NodeStatus {
  Digest peer_id{};
  std::size_t peer_count = 0;
  std::size_t listing_count = 0;
  std::int64_t uptime_s = 0;
  bool registered = false;

  Json to_json() const;
};

struct BidRequest {
  market::ContentId content_id;
  std::int64_t amount = 0;
  std::string currency;
  std::optional<Digest> target_peer;  // defaults to the listing owner
};

struct SentMessage {
  Digest channel_id{};
  Digest target{};
};

// A running market node: listing store, gossip node, chat book and the
// local HTTP API, wired together.
class Daemon {
 public:
  /// Throws Error(authorization) when `bundle` is missing: an unregistered
  /// node has nothing to offer the network.
  Daemon(NodeConfig config, crypto::PrivateKey key, std::optional<crypto::KeyBundle> bundle,
         crypto::PublicKey server_key, const Clock& clock);
  ~Daemon();
  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  /// Loads the store, binds the p2p listener and the API, then joins via
  /// the configured bootstrap addresses. Throws Error(io) on port conflicts
  /// and Error(bootstrap_failed) if none of them answers.
  void start();
  void stop();

  int api_port() const noexcept { return api_port_; }
  std::string p2p_address() const { return node_->address(); }
  gossip::Node& node() noexcept { return *node_; }
  market::ListingStore& store() noexcept { return *store_; }
  market::ChatBook& chats() noexcept { return chats_; }

  NodeStatus status();
  std::vector<market::SignedListing> verified_listings();
  market::SignedListing post_listing(const market::ListingDraft& draft);
  market::Tombstone delete_listing(const market::ContentId& id);
  SentMessage send_bid(const BidRequest& request);
  SentMessage send_chat(const Digest& channel_id, const std::string& body);

 private:
  void install_routes();
  void on_envelope(const crypto::Envelope& env);
  void deliver(const Digest& target, const market::DirectMessage& msg);
  std::optional<market::Channel> resolve_channel(const Digest& channel_id);

  NodeConfig config_;
  crypto::KeyBundle bundle_;
  crypto::PublicKey server_key_;
  const Clock& clock_;
  std::unique_ptr<market::ListingStore> store_;
  std::unique_ptr<gossip::Node> node_;
  market::ChatBook chats_;
  std::unique_ptr<httplib::Server> api_;
  std::thread api_thread_;
  int api_port_ = 0;
  std::chrono::steady_clock::time_point started_{};
  bool running_ = false;
};

}  // namespace marketpalace::node
