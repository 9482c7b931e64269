#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/door/attribute.hpp"
#include "marketpalace/door/hash_store.hpp"
#include "marketpalace/door/session.hpp"

namespace marketpalace::door {

inline constexpr std::int64_t kDefaultSessionTtlSeconds = 300;

enum class DisclosureResult { accepted, duplicate, invalid };

std::string_view to_string(DisclosureResult r) noexcept;

struct SessionStart {
  SessionToken token;
  std::string qr_payload;
};

struct DoorOptions {
  std::string advertised_host = "127.0.0.1:8080";  // goes into the QR payload
  std::int64_t session_ttl_s = kDefaultSessionTtlSeconds;
};

// The registration authority. Admits each attribute value at most once and
// certifies one public key per admitted session.
//
// Sessions are locked individually; the hash store serializes its own
// inserts. A duplicate disclosure burns the session (moves it to expired).
class DoorServer {
 public:
  DoorServer(crypto::PrivateKey server_key, std::shared_ptr<const AttributeVerifier> verifier,
             HashStore& store, const Clock& clock, DoorOptions options = {});

  SessionStart start_session();
  AssertionStatus verify_attribute_assertion(const AttributeDisclosure& d) const;

  /// Throws Error(session) if the token is unknown, expired or past `created`.
  DisclosureResult disclose(std::string_view token, const AttributeDisclosure& d);

  /// Throws Error(session) unless the token is attributes-verified and
  /// Error(encoding) for a malformed key.
  crypto::CertifiedKey complete_registration(std::string_view token, ByteView public_key_der);

  /// Moves sessions older than the TTL to expired. Returns how many moved.
  std::size_t expire_sessions(std::int64_t now);

  /// Snapshot of a session; throws Error(session) if unknown.
  SessionToken session(std::string_view token) const;

  const crypto::PublicKey& server_public_key() const noexcept { return server_public_; }
  const DoorOptions& options() const noexcept { return options_; }

 private:
  struct Entry {
    std::mutex mutex;
    SessionToken state;
  };

  std::shared_ptr<Entry> find(std::string_view token) const;
  /// Caller holds entry->mutex.
  void expire_if_stale(Entry& e, std::int64_t now) const;

  crypto::PrivateKey server_key_;
  crypto::PublicKey server_public_;
  std::shared_ptr<const AttributeVerifier> verifier_;
  HashStore& store_;
  const Clock& clock_;
  DoorOptions options_;

  mutable std::mutex table_mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
};

}  // namespace marketpalace::door
