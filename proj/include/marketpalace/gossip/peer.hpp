#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"

namespace marketpalace::gossip {

/// SHA-256 of a certified public key's DER encoding.
using PeerId = Digest;

/// Throws Error(encoding) when the certificate's key is malformed.
PeerId peer_id_from_cert(const crypto::CertifiedKey& cert);

struct PeerInfo {
  PeerId peer_id{};
  std::string address;  // host:port
  crypto::CertifiedKey cert;
  std::int64_t last_seen = 0;

  Json to_json() const;
  static PeerInfo from_json(const Json& j);
};

// Flat set of certified peers keyed by id. Not synchronized; the owning
// node touches it only from its event loop.
class PeerTable {
 public:
  explicit PeerTable(crypto::PublicKey server_key, std::size_t capacity = 1024);

  /// Inserts or refreshes `info`. Returns false (and leaves the table
  /// unchanged) if the certificate does not verify, the id does not match
  /// the certificate, or the table is full.
  bool upsert(const PeerInfo& info);
  bool remove(const PeerId& id);
  std::optional<PeerInfo> get(const PeerId& id) const;
  std::vector<PeerInfo> all() const;
  std::size_t size() const noexcept { return peers_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

  /// Up to k peers nearest to `target` by XOR distance, ties by id.
  std::vector<PeerInfo> k_closest(const PeerId& target, std::size_t k) const;

  /// Consecutive delivery failures; reset by a successful contact.
  void record_failure(const PeerId& id);
  void record_success(const PeerId& id, std::int64_t now);
  int failures(const PeerId& id) const;

 private:
  crypto::PublicKey server_key_;
  std::size_t capacity_;
  std::map<PeerId, PeerInfo> peers_;
  std::map<PeerId, int> failures_;
};

}  // namespace marketpalace::gossip
