#include "marketpalace/door/door_server.hpp"

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/log.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::door {

std::string_view to_string(DisclosureResult r) noexcept {
  switch (r) {
    case DisclosureResult::accepted: return "accepted";
    case DisclosureResult::duplicate: return "duplicate";
    case DisclosureResult::invalid: return "invalid";
  }
  return "unknown";
}

DoorServer::DoorServer(crypto::PrivateKey server_key,
                       std::shared_ptr<const AttributeVerifier> verifier, HashStore& store,
                       const Clock& clock, DoorOptions options)
    : server_key_(std::move(server_key)),
      server_public_(server_key_.public_key()),
      verifier_(std::move(verifier)),
      store_(store),
      clock_(clock),
      options_(std::move(options)) {}

SessionStart DoorServer::start_session() {
  auto entry = std::make_shared<Entry>();
  entry->state.created_at = clock_.now();
  entry->state.state = SessionState::created;
  std::lock_guard lock(table_mutex_);
  do {
    entry->state.token = hex_encode(crypto::random_bytes(16));
  } while (sessions_.contains(entry->state.token));
  sessions_.emplace(entry->state.token, entry);
  return SessionStart{entry->state, make_qr_payload(options_.advertised_host, entry->state.token)};
}

AssertionStatus DoorServer::verify_attribute_assertion(const AttributeDisclosure& d) const {
  return verifier_->verify(d);
}

std::shared_ptr<DoorServer::Entry> DoorServer::find(std::string_view token) const {
  std::lock_guard lock(table_mutex_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw Error(Errc::session, "unknown session token");
  return it->second;
}

void DoorServer::expire_if_stale(Entry& e, std::int64_t now) const {
  if (e.state.state == SessionState::created || e.state.state == SessionState::attributes_verified) {
    if (now - e.state.created_at > options_.session_ttl_s) e.state.state = SessionState::expired;
  }
}

DisclosureResult DoorServer::disclose(std::string_view token, const AttributeDisclosure& d) {
  auto entry = find(token);
  std::lock_guard lock(entry->mutex);
  expire_if_stale(*entry, clock_.now());
  if (entry->state.state != SessionState::created) {
    throw Error(Errc::session, std::string("session is ") + std::string(to_string(entry->state.state)));
  }
  auto status = verify_attribute_assertion(d);
  if (status != AssertionStatus::valid) {
    log::info("door", "disclosure rejected: " + std::string(to_string(status)));
    return DisclosureResult::invalid;
  }
  Digest digest = crypto::sha256(as_bytes(d.attribute_value));
  std::string hex = hex_encode(digest);
  if (!store_.insert_if_absent(hex)) {
    entry->state.state = SessionState::expired;
    log::info("door", "duplicate identity hash " + hex.substr(0, 12) + "..., access denied");
    return DisclosureResult::duplicate;
  }
  entry->state.attribute_hash = digest;
  entry->state.state = SessionState::attributes_verified;
  log::debug("door", "identity hash " + hex.substr(0, 12) + "... admitted");
  return DisclosureResult::accepted;
}

crypto::CertifiedKey DoorServer::complete_registration(std::string_view token,
                                                       ByteView public_key_der) {
  auto entry = find(token);
  std::lock_guard lock(entry->mutex);
  expire_if_stale(*entry, clock_.now());
  if (entry->state.state != SessionState::attributes_verified) {
    throw Error(Errc::session, std::string("session is ") + std::string(to_string(entry->state.state)));
  }
  auto cert = crypto::certify_key(server_key_, public_key_der);
  entry->state.state = SessionState::completed;
  return cert;
}

std::size_t DoorServer::expire_sessions(std::int64_t now) {
  std::lock_guard lock(table_mutex_);
  std::size_t moved = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    auto& entry = *it->second;
    std::lock_guard entry_lock(entry.mutex);
    auto before = entry.state.state;
    expire_if_stale(entry, now);
    if (before != entry.state.state) ++moved;
    // Finished sessions are dropped after twice the TTL.
    bool finished = entry.state.state == SessionState::expired ||
                    entry.state.state == SessionState::completed;
    if (finished && now - entry.state.created_at > 2 * options_.session_ttl_s) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
  return moved;
}

SessionToken DoorServer::session(std::string_view token) const {
  auto entry = find(token);
  std::lock_guard lock(entry->mutex);
  expire_if_stale(*entry, clock_.now());
  return entry->state;
}

}  // namespace marketpalace::door
