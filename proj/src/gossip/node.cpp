#include "marketpalace/gossip/node.hpp"

#include <cmath>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/log.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::gossip {
namespace {

constexpr Millis kIdleTimeout{24 * 60 * 60 * 1000};

std::string short_id(const PeerId& id) { return hex_encode(id).substr(0, 12); }

}  // namespace

Json Hello::to_json() const { return Json{{"cert", cert.to_json()}, {"listen_addr", listen_addr}}; }

Hello Hello::from_json(const Json& j) {
  ObjectReader r(j, "hello");
  Hello h;
  h.cert = crypto::CertifiedKey::from_json(r.object("cert"));
  h.listen_addr = r.string("listen_addr");
  r.finish();
  return h;
}

Json push_payload(const market::StoreSnapshot& snapshot) {
  Json listings = Json::array();
  for (const auto& sl : snapshot.listings) listings.push_back(sl.to_json());
  Json tombstones = Json::array();
  for (const auto& t : snapshot.tombstones) tombstones.push_back(t.to_json());
  return Json{{"listings", std::move(listings)}, {"tombstones", std::move(tombstones)}};
}

market::StoreSnapshot parse_push_payload(const Json& j) {
  try {
    ObjectReader r(j, "push");
    market::StoreSnapshot s;
    for (const auto& l : r.array("listings")) s.listings.push_back(market::SignedListing::from_json(l));
    for (const auto& t : r.array("tombstones")) s.tombstones.push_back(market::Tombstone::from_json(t));
    r.finish();
    return s;
  } catch (const Error& e) {
    if (e.code() == Errc::parse) throw;
    throw Error(Errc::parse, "push: " + e.detail());
  }
}

Node::Node(Identity identity, crypto::PublicKey server_key, market::ListingStore& store, const Clock& clock,
           NodeOptions options)
    : identity_(std::move(identity)),
      id_(peer_id_from_cert(identity_.cert)),
      server_key_(std::move(server_key)),
      store_(store),
      clock_(clock),
      options_(std::move(options)),
      table_(server_key_),
      pool_([this] { return hello_message(); },
            ConnectionPool::Timeouts{options_.connect_timeout, options_.io_timeout}),
      workers_(options_.io_threads) {
  if (!(options_.period_s > 0)) throw Error(Errc::rejected_parameters, "push period must be positive");
  if (options_.k < 1) throw Error(Errc::rejected_parameters, "k must be at least 1");
  if (!crypto::verify_certification(server_key_, identity_.cert)) {
    throw Error(Errc::bad_cert, "node certificate is not signed by the door server");
  }
  if (!(identity_.key.public_key().der() == identity_.cert.public_key_der)) {
    throw Error(Errc::rejected_parameters, "certificate does not match the private key");
  }
  if (options_.advertised_host.empty()) options_.advertised_host = options_.listen_host;
  timer_.period_s = options_.period_s;
  if (options_.phase_s) {
    if (*options_.phase_s < 0 || *options_.phase_s >= options_.period_s) {
      throw Error(Errc::rejected_parameters, "phase must lie in [0, period)");
    }
    timer_.phase_s = *options_.phase_s;
  } else {
    timer_.phase_s = static_cast<double>(crypto::random_u64() >> 11) * 0x1.0p-53 * options_.period_s;
  }
}

Node::~Node() { stop(); }

void Node::start() {
  if (running_) return;
  listener_ = std::make_unique<Listener>(options_.listen_host, options_.listen_port);
  address_ = options_.advertised_host + ":" + std::to_string(listener_->port());
  started_at_ = std::chrono::steady_clock::now();
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  schedule_fire(0);
  log::info("node", "listening on " + address_ + " as " + short_id(id_));
}

void Node::stop() {
  if (!running_.exchange(false)) {
    loop_.stop();
    return;
  }
  listener_->close();
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(inbound_mutex_);
    for (auto& c : inbound_) c.socket.shutdown();
  }
  reap_inbound(true);
  pool_.close_all();
  workers_.stop();
  pool_.close_all();
  loop_.stop();
}

std::string Node::address() const { return address_; }

WireMessage Node::hello_message() const {
  return WireMessage::make(MessageType::hello, Hello{identity_.cert, address_}.to_json());
}

PeerInfo Node::peer_from_hello(const Hello& h) const {
  return PeerInfo{h.cert.fingerprint(), h.listen_addr, h.cert, clock_.now()};
}

void Node::schedule_fire(std::uint64_t n) {
  auto offset = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(timer_.fire_time(n)));
  loop_.post_at(started_at_ + offset, [this, n] {
    if (!running_) return;
    dispatch(on_timer_fire());
    schedule_fire(n + 1);
  });
}

std::vector<OutgoingPush> Node::on_timer_fire() {
  return loop_.call([this] {
    store_.expire(clock_);
    WireMessage msg = WireMessage::make(MessageType::push, push_payload(store_.snapshot(clock_)));
    std::vector<OutgoingPush> out;
    for (auto& peer : table_.k_closest(id_, options_.k)) out.push_back(OutgoingPush{std::move(peer), msg});
    return out;
  });
}

bool Node::deliver(const OutgoingPush& push) {
  bool ok = false;
  try {
    auto reply = pool_.request(push.peer.address, push.message, true);
    ok = reply && reply->type == MessageType::push_ack;
  } catch (const Error& e) {
    log::warn("node", "push to " + short_id(push.peer.peer_id) + " failed: " + e.detail());
  }
  PeerId id = push.peer.peer_id;
  loop_.post([this, id, ok] {
    if (ok) {
      table_.record_success(id, clock_.now());
    } else {
      table_.record_failure(id);
    }
  });
  return ok;
}

void Node::dispatch(std::vector<OutgoingPush> pushes) {
  for (auto& p : pushes) {
    workers_.submit([this, p = std::move(p)] { deliver(p); });
  }
}

void Node::fire_now() {
  for (const auto& p : on_timer_fire()) deliver(p);
}

market::MergeReport Node::merge_push(const Hello& sender, const Json& payload) {
  if (!crypto::verify_certification(server_key_, sender.cert)) {
    log::warn("node", "rejected push from uncertified sender");
    throw Error(Errc::bad_cert, "push sender is not certified");
  }
  market::StoreSnapshot batch = parse_push_payload(payload);
  std::vector<market::ContentId> fresh;
  if (observer_) {
    for (const auto& sl : batch.listings) {
      if (!store_.contains(sl.content_id)) fresh.push_back(sl.content_id);
    }
  }
  market::MergeReport report = store_.merge(batch.listings, batch.tombstones, clock_);
  if (observer_ && !fresh.empty()) {
    auto now = std::chrono::steady_clock::now();
    for (const auto& id : fresh) {
      if (auto sl = store_.get(id)) observer_(*sl, now);
    }
  }
  PeerInfo info = peer_from_hello(sender);
  if (info.peer_id != id_ && table_.upsert(info)) table_.record_success(info.peer_id, info.last_seen);
  return report;
}

market::MergeReport Node::handle_push(const Hello& sender, const Json& payload) {
  return loop_.call([&] { return merge_push(sender, payload); });
}

void Node::send_envelope(const PeerId& target, const crypto::Envelope& env) {
  auto peer = loop_.call([&] { return table_.get(target); });
  if (!peer) throw Error(Errc::not_found, "unknown peer " + hex_encode(target));
  try {
    pool_.request(peer->address, WireMessage::make(MessageType::envelope, env.to_json()), false);
  } catch (const Error&) {
    loop_.post([this, target] { table_.record_failure(target); });
    throw;
  }
}

std::size_t Node::bootstrap(const std::vector<std::string>& addresses) {
  if (addresses.empty()) throw Error(Errc::rejected_parameters, "no bootstrap address given");
  for (int attempt = 0; attempt < options_.bootstrap_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.bootstrap_retry_delay);
    std::vector<PeerInfo> learned;
    bool reached = false;
    for (const auto& addr : addresses) {
      try {
        Hello h = Hello::from_json(pool_.handshake(addr).json());
        PeerInfo boot = peer_from_hello(h);
        if (boot.peer_id == id_) continue;
        if (!add_peer(boot)) {
          log::warn("node", "bootstrap " + addr + " presented an invalid certificate");
          continue;
        }
        auto reply = pool_.request(addr, WireMessage::make(MessageType::peers_request, Json::object()), true);
        if (!reply || reply->type != MessageType::peers_response) {
          throw Error(Errc::unreachable, addr + " sent no peer list");
        }
        Json body = reply->json();
        ObjectReader r(body, "peers_response");
        for (const auto& p : r.array("peers")) learned.push_back(PeerInfo::from_json(p));
        reached = true;
      } catch (const Error& e) {
        log::warn("node", "bootstrap " + addr + ": " + e.detail());
      }
    }
    if (!reached) continue;
    for (const auto& p : learned) {
      if (p.peer_id == id_) continue;
      try {
        Hello h = Hello::from_json(pool_.handshake(p.address).json());
        add_peer(peer_from_hello(h));
      } catch (const Error& e) {
        log::warn("node", "learned peer " + p.address + " unreachable: " + e.detail());
        add_peer(p);
      }
    }
    return peers().size();
  }
  throw Error(Errc::bootstrap_failed, "no bootstrap node answered after " +
                                          std::to_string(options_.bootstrap_attempts) + " attempts");
}

market::SignedListing Node::add_listing(const market::ListingDraft& draft) {
  return loop_.call([&] {
    auto sl = market::create_signed_listing(identity_.key, identity_.cert, draft, clock_);
    store_.merge(std::span(&sl, 1), {}, clock_);
    return sl;
  });
}

market::Tombstone Node::remove_listing(const market::ContentId& id) {
  return loop_.call([&] { return store_.remove_listing(identity_.key, identity_.cert, id, clock_); });
}

std::vector<PeerInfo> Node::peers() {
  return loop_.call([this] { return table_.all(); });
}

std::optional<PeerInfo> Node::peer(const PeerId& id) {
  return loop_.call([&] { return table_.get(id); });
}

bool Node::add_peer(const PeerInfo& info) {
  if (info.peer_id == id_) return false;
  return loop_.call([&] { return table_.upsert(info); });
}

void Node::set_listing_observer(ListingObserver observer) {
  loop_.call([&] { observer_ = std::move(observer); });
}

void Node::set_envelope_handler(EnvelopeHandler handler) {
  loop_.call([&] { envelope_handler_ = std::move(handler); });
}

void Node::accept_loop() {
  while (running_) {
    Socket s = listener_->accept();
    if (!s.valid()) break;
    reap_inbound(false);
    std::lock_guard lock(inbound_mutex_);
    if (!running_) break;
    auto& conn = inbound_.emplace_back();
    conn.socket = std::move(s);
    conn.thread = std::thread([this, &conn] {
      serve_connection(conn);
      std::lock_guard lock(inbound_mutex_);
      conn.socket.close();
      conn.done = true;
    });
  }
}

void Node::reap_inbound(bool all) {
  std::list<Inbound> finished;
  {
    std::lock_guard lock(inbound_mutex_);
    for (auto it = inbound_.begin(); it != inbound_.end();) {
      auto next = std::next(it);
      if (all || it->done) finished.splice(finished.end(), inbound_, it);
      it = next;
    }
  }
  for (auto& c : finished) {
    if (c.thread.joinable()) c.thread.join();
  }
}

void Node::serve_connection(Inbound& conn) {
  std::optional<Hello> session;
  try {
    while (running_) {
      auto msg = conn.socket.read_frame(kIdleTimeout);
      if (!msg) return;
      if (!session) {
        if (msg->type != MessageType::hello) {
          log::warn("node", std::string("rejected ") + std::string(to_string(msg->type)) +
                                " on a connection without hello");
          return;
        }
        Hello h;
        try {
          h = Hello::from_json(msg->json());
        } catch (const Error&) {
          return;
        }
        if (!crypto::verify_certification(server_key_, h.cert)) {
          log::warn("node", "rejected hello with an uncertified key");
          return;
        }
        session = h;
        PeerInfo info = peer_from_hello(h);
        if (info.peer_id != id_) loop_.post([this, info] { table_.upsert(info); });
        conn.socket.write_frame(WireMessage::make(MessageType::hello_ack, Hello{identity_.cert, address_}.to_json()),
                                options_.io_timeout);
        continue;
      }
      std::optional<WireMessage> reply;
      try {
        reply = handle_frame(session, *msg);
      } catch (const Error& e) {
        if (e.code() == Errc::bad_cert) return;
        log::debug("node", std::string("dropped ") + std::string(to_string(msg->type)) + ": " + e.detail());
        if (msg->type == MessageType::push) {
          reply = WireMessage::make(MessageType::push_ack, Json{{"error", to_string(e.code())}});
        }
      }
      if (reply) conn.socket.write_frame(*reply, options_.io_timeout);
    }
  } catch (const Error& e) {
    log::debug("node", "inbound connection closed: " + e.detail());
  }
}

std::optional<WireMessage> Node::handle_frame(const std::optional<Hello>& session, const WireMessage& msg) {
  switch (msg.type) {
    case MessageType::hello:
      return WireMessage::make(MessageType::hello_ack, Hello{identity_.cert, address_}.to_json());
    case MessageType::push: {
      auto report = handle_push(*session, msg.json());
      return WireMessage::make(MessageType::push_ack, report.to_json());
    }
    case MessageType::envelope: {
      auto env = crypto::Envelope::from_json(msg.json());
      loop_.post([this, env = std::move(env)] {
        if (envelope_handler_) envelope_handler_(env);
      });
      return std::nullopt;
    }
    case MessageType::peers_request: {
      PeerId requester = session->cert.fingerprint();
      Json peers = Json::array();
      for (const auto& p : this->peers()) {
        if (p.peer_id != requester) peers.push_back(p.to_json());
      }
      return WireMessage::make(MessageType::peers_response, Json{{"peers", std::move(peers)}});
    }
    default:
      return std::nullopt;
  }
}

}  // namespace marketpalace::gossip
