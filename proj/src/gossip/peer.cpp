#include "marketpalace/gossip/peer.hpp"

#include "marketpalace/common/error.hpp"
#include "marketpalace/gossip/xor_metric.hpp"

namespace marketpalace::gossip {

PeerId peer_id_from_cert(const crypto::CertifiedKey& cert) {
  (void)cert.public_key();  // reject malformed keys
  return cert.fingerprint();
}

Json PeerInfo::to_json() const {
  return Json{{"address", address},
              {"cert", cert.to_json()},
              {"last_seen", last_seen},
              {"peer_id", hex_encode(peer_id)}};
}

PeerInfo PeerInfo::from_json(const Json& j) {
  ObjectReader r(j, "peer_info");
  PeerInfo p;
  p.address = r.string("address");
  p.cert = crypto::CertifiedKey::from_json(r.object("cert"));
  p.last_seen = r.integer("last_seen");
  p.peer_id = r.digest_hex("peer_id");
  r.finish();
  return p;
}

PeerTable::PeerTable(crypto::PublicKey server_key, std::size_t capacity)
    : server_key_(std::move(server_key)), capacity_(capacity) {}

bool PeerTable::upsert(const PeerInfo& info) {
  if (!crypto::verify_certification(server_key_, info.cert)) return false;
  if (info.cert.fingerprint() != info.peer_id) return false;
  auto it = peers_.find(info.peer_id);
  if (it == peers_.end()) {
    if (peers_.size() >= capacity_) return false;
    peers_.emplace(info.peer_id, info);
    return true;
  }
  it->second.address = info.address;
  it->second.last_seen = std::max(it->second.last_seen, info.last_seen);
  return true;
}

bool PeerTable::remove(const PeerId& id) {
  failures_.erase(id);
  return peers_.erase(id) > 0;
}

std::optional<PeerInfo> PeerTable::get(const PeerId& id) const {
  auto it = peers_.find(id);
  if (it == peers_.end()) return std::nullopt;
  return it->second;
}

std::vector<PeerInfo> PeerTable::all() const {
  std::vector<PeerInfo> out;
  out.reserve(peers_.size());
  for (const auto& [id, p] : peers_) out.push_back(p);
  return out;
}

std::vector<PeerInfo> PeerTable::k_closest(const PeerId& target, std::size_t k) const {
  return gossip::k_closest(peers_ | std::views::values, target, k, &PeerInfo::peer_id);
}

void PeerTable::record_failure(const PeerId& id) {
  if (peers_.contains(id)) ++failures_[id];
}

void PeerTable::record_success(const PeerId& id, std::int64_t now) {
  failures_.erase(id);
  if (auto it = peers_.find(id); it != peers_.end()) it->second.last_seen = now;
}

int PeerTable::failures(const PeerId& id) const {
  auto it = failures_.find(id);
  return it == failures_.end() ? 0 : it->second;
}

}  // namespace marketpalace::gossip
