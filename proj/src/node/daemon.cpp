#include "marketpalace/node/daemon.hpp"

#include <httplib.h>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/http_util.hpp"
#include "marketpalace/common/log.hpp"

namespace marketpalace::node {
namespace {

const crypto::KeyBundle& require_bundle(const std::optional<crypto::KeyBundle>& bundle) {
  if (!bundle) {
    throw Error(Errc::authorization, "this node is not registered; run 'marketpalace register' first");
  }
  return *bundle;
}

gossip::NodeOptions node_options(const NodeConfig& config) {
  auto [host, port] = http::split_host_port(config.listen_addr);
  gossip::NodeOptions o;
  o.listen_host = host;
  o.listen_port = port;
  o.advertised_host = config.advertised_host;
  o.period_s = config.timer_period_s;
  o.k = config.k;
  return o;
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    http::reply_error(res, e);
  }
}

Json body_of(const httplib::Request& req) { return parse_json(req.body); }

}  // namespace

Json NodeStatus::to_json() const {
  return Json{{"listing_count", listing_count},
              {"peer_count", peer_count},
              {"peer_id", hex_encode(peer_id)},
              {"registered", registered},
              {"uptime_s", uptime_s}};
}

Daemon::Daemon(NodeConfig config, crypto::PrivateKey key, std::optional<crypto::KeyBundle> bundle,
               crypto::PublicKey server_key, const Clock& clock)
    : config_(std::move(config)),
      bundle_(require_bundle(bundle)),
      server_key_(std::move(server_key)),
      clock_(clock),
      chats_(bundle_.cert.fingerprint()) {
  config_.validate();
  store_ = std::make_unique<market::ListingStore>(server_key_, std::filesystem::path(config_.data_dir) / "store");
  node_ = std::make_unique<gossip::Node>(gossip::Identity{std::move(key), bundle_.cert}, server_key_, *store_,
                                         clock_, node_options(config_));
  node_->set_envelope_handler([this](const crypto::Envelope& env) { on_envelope(env); });
  api_ = std::make_unique<httplib::Server>();
  http::exclusive_bind(*api_);
  install_routes();
}

Daemon::~Daemon() { stop(); }

void Daemon::start() {
  store_->load(clock_);
  node_->start();
  auto [host, port] = http::split_host_port(config_.api_addr);
  api_port_ = port == 0 ? api_->bind_to_any_port(host) : (api_->bind_to_port(host, port) ? port : -1);
  if (api_port_ < 0) {
    node_->stop();
    throw Error(Errc::io, "cannot bind the API to " + config_.api_addr);
  }
  api_thread_ = std::thread([this] { api_->listen_after_bind(); });
  api_->wait_until_ready();
  started_ = std::chrono::steady_clock::now();
  running_ = true;
  log::info("daemon", "API on " + host + ":" + std::to_string(api_port_));
  if (!config_.bootstrap_addrs.empty()) {
    try {
      std::size_t n = node_->bootstrap(config_.bootstrap_addrs);
      log::info("daemon", "joined with " + std::to_string(n) + " peers");
    } catch (...) {
      stop();
      throw;
    }
  }
}

void Daemon::stop() {
  if (!running_) return;
  running_ = false;
  api_->stop();
  if (api_thread_.joinable()) api_thread_.join();
  node_->stop();
}

NodeStatus Daemon::status() {
  NodeStatus s;
  s.peer_id = node_->id();
  s.peer_count = node_->peers().size();
  s.listing_count = store_->size();
  s.uptime_s = running_ ? std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started_)
                              .count()
                        : 0;
  s.registered = crypto::verify_certification(server_key_, bundle_.cert);
  return s;
}

std::vector<market::SignedListing> Daemon::verified_listings() {
  std::vector<market::SignedListing> out;
  for (auto& sl : store_->listings()) {
    if (market::verify_signed_listing(server_key_, sl, clock_) == market::ListingCheck::valid) {
      out.push_back(std::move(sl));
    }
  }
  return out;
}

market::SignedListing Daemon::post_listing(const market::ListingDraft& draft) { return node_->add_listing(draft); }

market::Tombstone Daemon::delete_listing(const market::ContentId& id) { return node_->remove_listing(id); }

void Daemon::deliver(const Digest& target, const market::DirectMessage& msg) {
  auto peer = node_->peer(target);
  if (!peer) throw Error(Errc::not_found, "peer " + hex_encode(target) + " is not in the peer table");
  const auto& ident = node_->identity();
  auto env = crypto::seal_envelope(ident.key, ident.cert, peer->cert.public_key(), msg.encode(), clock_.now());
  node_->send_envelope(target, env);
}

SentMessage Daemon::send_bid(const BidRequest& request) {
  const Digest self = bundle_.cert.fingerprint();
  auto listing = store_->get(request.content_id);
  Digest target{};
  if (request.target_peer) {
    target = *request.target_peer;
  } else if (listing) {
    target = listing->listing.owner_fingerprint;
  } else {
    throw Error(Errc::not_found, "unknown listing " + request.content_id.hex());
  }
  if (listing && listing->listing.currency != request.currency) {
    throw Error(Errc::validation, "bid currency must match the listing currency " + listing->listing.currency);
  }
  if (target == self) throw Error(Errc::validation, "cannot bid on your own listing");
  auto bid = market::Bid::create(request.content_id, request.amount, request.currency, self, clock_.now());
  deliver(target, market::DirectMessage{bid, std::nullopt});
  Digest channel = chats_.open(target, request.content_id);
  chats_.record(channel, market::ChatEntry{self, "bid", std::to_string(bid.amount()) + " " + bid.currency(),
                                           bid.amount(), bid.currency(), bid.created_at()});
  return {channel, target};
}

std::optional<market::Channel> Daemon::resolve_channel(const Digest& channel_id) {
  if (auto ch = chats_.get(channel_id)) return ch;
  const Digest self = bundle_.cert.fingerprint();
  for (const auto& sl : store_->listings()) {
    const Digest& owner = sl.listing.owner_fingerprint;
    if (owner == self) continue;
    if (market::chat_channel_id(self, owner, sl.content_id) == channel_id) {
      chats_.open(owner, sl.content_id);
      return chats_.get(channel_id);
    }
  }
  return std::nullopt;
}

SentMessage Daemon::send_chat(const Digest& channel_id, const std::string& body) {
  auto ch = resolve_channel(channel_id);
  if (!ch) throw Error(Errc::not_found, "unknown chat channel " + hex_encode(channel_id));
  market::ChatMessage msg{channel_id, ch->content_id, body, clock_.now()};
  msg.validate();
  deliver(ch->peer, market::DirectMessage{std::nullopt, msg});
  chats_.record(channel_id, market::ChatEntry{ch->self, "chat", body, std::nullopt, "", msg.sent_at});
  return {channel_id, ch->peer};
}

void Daemon::on_envelope(const crypto::Envelope& env) {
  try {
    auto opened = crypto::open_envelope(node_->identity().key, server_key_, env);
    Digest sender = opened.sender.fingerprint();
    auto msg = market::DirectMessage::decode(opened.plaintext);
    if (msg.bid) {
      const auto& bid = *msg.bid;
      if (bid.bidder_fingerprint() != sender) throw Error(Errc::validation, "bid names another bidder");
      Digest channel = chats_.open(sender, bid.content_id());
      chats_.record(channel, market::ChatEntry{sender, "bid", std::to_string(bid.amount()) + " " + bid.currency(),
                                               bid.amount(), bid.currency(), bid.created_at()});
    } else if (msg.chat) {
      const auto& chat = *msg.chat;
      if (market::chat_channel_id(bundle_.cert.fingerprint(), sender, chat.content_id) != chat.channel_id) {
        throw Error(Errc::validation, "chat channel does not match its participants");
      }
      chats_.open(sender, chat.content_id);
      chats_.record(chat.channel_id, market::ChatEntry{sender, "chat", chat.body, std::nullopt, "", chat.sent_at});
    }
  } catch (const Error& e) {
    log::warn("daemon", std::string("dropped envelope: ") + std::string(to_string(e.code())) + ": " + e.detail());
  }
}

void Daemon::install_routes() {
  using httplib::Request;
  using httplib::Response;
  constexpr const char* kId = "([0-9a-f]{64})";

  api_->Get("/status", [this](const Request&, Response& res) {
    guarded(res, [&] { http::reply_json(res, 200, status().to_json()); });
  });

  api_->Get("/listings", [this](const Request&, Response& res) {
    guarded(res, [&] {
      Json out = Json::array();
      for (const auto& sl : verified_listings()) out.push_back(sl.to_json());
      http::reply_json(res, 200, out);
    });
  });

  api_->Post("/listings", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      Json body = body_of(req);
      ObjectReader r(body, "listing_request");
      market::ListingDraft d;
      d.title = r.string("title");
      d.description = r.has("description") ? r.string("description") : "";
      d.price_amount = r.integer("price_amount");
      d.currency = r.string("currency");
      if (r.has("ttl_s")) d.ttl_s = r.integer("ttl_s");
      r.finish();
      http::reply_json(res, 201, post_listing(d).to_json());
    });
  });

  api_->Delete(std::string("/listings/") + kId, [this](const Request& req, Response& res) {
    guarded(res, [&] {
      auto t = delete_listing(market::ContentId::from_hex(req.matches[1].str()));
      http::reply_json(res, 200, t.to_json());
    });
  });

  api_->Post("/bids", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      Json body = body_of(req);
      ObjectReader r(body, "bid_request");
      BidRequest b;
      b.content_id = market::ContentId(r.digest_hex("content_id"));
      b.amount = r.integer("amount");
      b.currency = r.string("currency");
      if (r.has("target_peer")) b.target_peer = r.digest_hex("target_peer");
      r.finish();
      auto sent = send_bid(b);
      http::reply_json(res, 200,
                       Json{{"channel_id", hex_encode(sent.channel_id)}, {"target_peer", hex_encode(sent.target)}});
    });
  });

  api_->Get("/chats", [this](const Request&, Response& res) {
    guarded(res, [&] {
      Json out = Json::array();
      for (const auto& ch : chats_.channels()) out.push_back(ch.summary_json());
      http::reply_json(res, 200, out);
    });
  });

  api_->Get(std::string("/chats/") + kId, [this](const Request& req, Response& res) {
    guarded(res, [&] {
      auto ch = resolve_channel(digest_from_hex(req.matches[1].str()));
      if (!ch) throw Error(Errc::not_found, "unknown chat channel");
      http::reply_json(res, 200, ch->to_json());
    });
  });

  api_->Post(std::string("/chats/") + kId, [this](const Request& req, Response& res) {
    guarded(res, [&] {
      Json request = body_of(req);
      ObjectReader r(request, "chat_request");
      std::string body = r.string("body");
      r.finish();
      auto sent = send_chat(digest_from_hex(req.matches[1].str()), body);
      http::reply_json(res, 200,
                       Json{{"channel_id", hex_encode(sent.channel_id)}, {"target_peer", hex_encode(sent.target)}});
    });
  });

  api_->Get("/peers", [this](const Request&, Response& res) {
    guarded(res, [&] {
      Json out = Json::array();
      for (const auto& p : node_->peers()) out.push_back(p.to_json());
      http::reply_json(res, 200, out);
    });
  });

  http::enable_cors(*api_, [](std::string_view origin) { return http::is_loopback_origin(origin); });

  api_->set_exception_handler([](const Request&, Response& res, std::exception_ptr) {
    http::reply_error(res, 500, "internal", "unexpected server error");
  });
}

}  // namespace marketpalace::node
