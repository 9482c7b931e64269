#include "marketpalace/market/listing_store.hpp"

#include <mutex>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/common/log.hpp"

namespace marketpalace::market {

MergeReport& MergeReport::operator+=(const MergeReport& o) {
  accepted += o.accepted;
  rejected += o.rejected;
  duplicates += o.duplicates;
  tombstones_applied += o.tombstones_applied;
  tombstones_rejected += o.tombstones_rejected;
  return *this;
}

Json MergeReport::to_json() const {
  return Json{{"accepted", accepted},
              {"duplicates", duplicates},
              {"rejected", rejected},
              {"tombstones_applied", tombstones_applied},
              {"tombstones_rejected", tombstones_rejected}};
}

ListingStore::ListingStore(crypto::PublicKey server_key, std::optional<std::filesystem::path> data_dir)
    : server_key_(std::move(server_key)), data_dir_(std::move(data_dir)) {
  if (data_dir_) std::filesystem::create_directories(*data_dir_ / "listings");
}

void ListingStore::load(const Clock& clock) {
  if (!data_dir_) return;
  std::vector<SignedListing> loaded;
  for (const auto& entry : std::filesystem::directory_iterator(*data_dir_ / "listings")) {
    if (entry.path().extension() != ".json") continue;
    try {
      loaded.push_back(SignedListing::from_json(parse_json(read_file(entry.path()))));
    } catch (const Error& e) {
      log::warn("store", "skipping unreadable " + entry.path().filename().string() + ": " + e.what());
    }
  }
  std::vector<AppliedTombstone> tombs;
  auto tomb_path = *data_dir_ / "tombstones.json";
  if (std::filesystem::exists(tomb_path)) {
    try {
      Json body = parse_json(read_file(tomb_path));
      ObjectReader r(body, "tombstones_file");
      for (const auto& item : r.array("tombstones")) {
        ObjectReader ir(item, "tombstone_entry");
        AppliedTombstone at;
        at.owner_key_der = ir.bytes("owner_public_key");
        at.retain_until = ir.integer("retain_until");
        at.tombstone = Tombstone::from_json(ir.object("tombstone"));
        ir.finish();
        tombs.push_back(std::move(at));
      }
      r.finish();
    } catch (const Error& e) {
      log::warn("store", std::string("ignoring unreadable tombstones.json: ") + e.what());
    }
  }

  std::unique_lock lock(mutex_);
  // Tombstones on disk were verified before they were written.
  for (auto& at : tombs) {
    if (at.retain_until > clock.now()) tombstones_.emplace(at.tombstone.content_id, at);
  }
  MergeReport report;
  for (const auto& sl : loaded) {
    bool keep_file = false;
    if (sl.listing.content_id() == sl.content_id) {
      merge_listing(sl, clock, report);
      keep_file = listings_.contains(sl.content_id);
    }
    if (!keep_file) unpersist_listing(sl.content_id);
  }
  if (tombstones_dirty_) persist_tombstones();
}

MergeReport ListingStore::merge(std::span<const SignedListing> listings,
                                std::span<const Tombstone> tombstones, const Clock& clock) {
  MergeReport report;
  std::unique_lock lock(mutex_);
  for (const auto& sl : listings) merge_listing(sl, clock, report);
  for (const auto& t : tombstones) merge_tombstone(t, clock, report);
  if (tombstones_dirty_) persist_tombstones();
  return report;
}

void ListingStore::merge_listing(const SignedListing& sl, const Clock& clock, MergeReport& report) {
  const ContentId& id = sl.content_id;
  if (tombstones_.contains(id) || listings_.contains(id)) {
    ++report.duplicates;
    return;
  }
  try {
    sl.listing.validate();
  } catch (const Error&) {
    ++report.rejected;
    return;
  }
  if (verify_signed_listing(server_key_, sl, clock) != ListingCheck::valid) {
    ++report.rejected;
    return;
  }
  if (auto it = pending_.find(id); it != pending_.end()) {
    auto owner = sl.owner_cert.public_key();
    std::optional<Tombstone> winner;
    for (const auto& t : it->second) {
      if (t.verify(owner)) {
        winner = t;  // std::set order: the smallest valid tombstone wins
        break;
      }
    }
    pending_.erase(it);
    pending_until_.erase(id);
    if (winner) {
      apply_tombstone(*winner, sl);
      ++report.tombstones_applied;
      ++report.duplicates;
      return;
    }
  }
  listings_.emplace(id, sl);
  persist_listing(sl);
  ++report.accepted;
}

void ListingStore::merge_tombstone(const Tombstone& t, const Clock& clock, MergeReport& report) {
  const ContentId& id = t.content_id;
  if (auto it = tombstones_.find(id); it != tombstones_.end()) {
    // Of several valid removals of one listing, the smallest is kept.
    if (t == it->second.tombstone) return;
    if (t < it->second.tombstone && t.verify(crypto::PublicKey::from_der(it->second.owner_key_der))) {
      it->second.tombstone = t;
      tombstones_dirty_ = true;
    }
    return;
  }
  if (auto it = listings_.find(id); it != listings_.end()) {
    if (!t.verify(it->second.owner_cert.public_key())) {
      ++report.tombstones_rejected;
      return;
    }
    SignedListing removed = std::move(it->second);
    listings_.erase(it);
    unpersist_listing(id);
    apply_tombstone(t, removed);
    ++report.tombstones_applied;
    return;
  }
  pending_[id].insert(t);
  pending_until_.try_emplace(id, clock.now() + kDefaultListingTtlSeconds + kTombstoneGraceSeconds);
}

void ListingStore::apply_tombstone(const Tombstone& t, const SignedListing& removed) {
  tombstones_.insert_or_assign(
      t.content_id, AppliedTombstone{t, removed.listing.expires_at + kTombstoneGraceSeconds,
                                     removed.owner_cert.public_key_der});
  tombstones_dirty_ = true;
}

Tombstone ListingStore::remove_listing(const crypto::PrivateKey& key, const crypto::CertifiedKey& cert,
                                       const ContentId& id, const Clock& clock) {
  if (cert.public_key_der != key.public_key().der()) {
    throw Error(Errc::rejected_parameters, "certificate does not belong to the signing key");
  }
  std::unique_lock lock(mutex_);
  auto it = listings_.find(id);
  if (it == listings_.end()) throw Error(Errc::not_found, "no listing " + id.hex());
  if (it->second.listing.owner_fingerprint != cert.fingerprint()) {
    throw Error(Errc::authorization, "only the owner can remove a listing");
  }
  Tombstone t = make_tombstone(key, id, clock.now());
  SignedListing removed = std::move(it->second);
  listings_.erase(it);
  unpersist_listing(id);
  apply_tombstone(t, removed);
  persist_tombstones();
  return t;
}

std::size_t ListingStore::expire(const Clock& clock) {
  std::int64_t now = clock.now();
  std::unique_lock lock(mutex_);
  std::size_t removed = 0;
  for (auto it = listings_.begin(); it != listings_.end();) {
    if (it->second.listing.expires_at <= now) {
      unpersist_listing(it->first);
      it = listings_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  for (auto it = tombstones_.begin(); it != tombstones_.end();) {
    if (it->second.retain_until <= now) {
      it = tombstones_.erase(it);
      tombstones_dirty_ = true;
    } else {
      ++it;
    }
  }
  for (auto it = pending_until_.begin(); it != pending_until_.end();) {
    if (it->second <= now) {
      pending_.erase(it->first);
      it = pending_until_.erase(it);
    } else {
      ++it;
    }
  }
  if (tombstones_dirty_) persist_tombstones();
  return removed;
}

StoreSnapshot ListingStore::snapshot(const Clock& clock) const {
  std::int64_t now = clock.now();
  std::shared_lock lock(mutex_);
  StoreSnapshot snap;
  for (const auto& [id, sl] : listings_) {
    if (sl.listing.expires_at > now) snap.listings.push_back(sl);
  }
  for (const auto& [id, at] : tombstones_) snap.tombstones.push_back(at.tombstone);
  return snap;
}

std::optional<SignedListing> ListingStore::get(const ContentId& id) const {
  std::shared_lock lock(mutex_);
  auto it = listings_.find(id);
  if (it == listings_.end()) return std::nullopt;
  return it->second;
}

std::vector<SignedListing> ListingStore::listings() const {
  std::shared_lock lock(mutex_);
  std::vector<SignedListing> out;
  out.reserve(listings_.size());
  for (const auto& [id, sl] : listings_) out.push_back(sl);
  return out;
}

bool ListingStore::contains(const ContentId& id) const {
  std::shared_lock lock(mutex_);
  return listings_.contains(id);
}

bool ListingStore::is_tombstoned(const ContentId& id) const {
  std::shared_lock lock(mutex_);
  return tombstones_.contains(id);
}

std::size_t ListingStore::size() const {
  std::shared_lock lock(mutex_);
  return listings_.size();
}

std::size_t ListingStore::pending_tombstones() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [id, set] : pending_) n += set.size();
  return n;
}

bool ListingStore::same_state(const ListingStore& other) const {
  if (this == &other) return true;
  std::shared_lock a(mutex_, std::defer_lock);
  std::shared_lock b(other.mutex_, std::defer_lock);
  std::lock(a, b);
  if (listings_ != other.listings_ || pending_ != other.pending_) return false;
  if (tombstones_.size() != other.tombstones_.size()) return false;
  for (const auto& [id, at] : tombstones_) {
    auto it = other.tombstones_.find(id);
    if (it == other.tombstones_.end() || !(it->second.tombstone == at.tombstone)) return false;
  }
  return true;
}

void ListingStore::persist_listing(const SignedListing& sl) const {
  if (!data_dir_) return;
  write_file_atomic(*data_dir_ / "listings" / (sl.content_id.hex() + ".json"),
                    canonical_dump(sl.to_json()) + "\n");
}

void ListingStore::unpersist_listing(const ContentId& id) const {
  if (!data_dir_) return;
  std::error_code ec;
  std::filesystem::remove(*data_dir_ / "listings" / (id.hex() + ".json"), ec);
}

void ListingStore::persist_tombstones() {
  tombstones_dirty_ = false;
  if (!data_dir_) return;
  Json arr = Json::array();
  for (const auto& [id, at] : tombstones_) {
    arr.push_back(Json{{"owner_public_key", base64_encode(at.owner_key_der)},
                       {"retain_until", at.retain_until},
                       {"tombstone", at.tombstone.to_json()}});
  }
  write_file_atomic(*data_dir_ / "tombstones.json", canonical_dump(Json{{"tombstones", arr}}) + "\n");
}

}  // namespace marketpalace::market
