#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <vector>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/market/listing.hpp"

namespace marketpalace::market {

struct MergeReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t duplicates = 0;
  std::size_t tombstones_applied = 0;
  std::size_t tombstones_rejected = 0;

  MergeReport& operator+=(const MergeReport& o);
  Json to_json() const;
};

struct StoreSnapshot {
  std::vector<SignedListing> listings;
  std::vector<Tombstone> tombstones;
};

// Replicated set of signed listings plus the tombstones that removed some of
// them. merge() is idempotent and order-insensitive:
//  * a listing is installed only if its certificate, fingerprint, signature
//    and bounds check out and it has not expired;
//  * a tombstone is applied only if it verifies under the owner key of the
//    listing it names. Tombstones for unknown listings wait in a pending set
//    and are resolved (applied or dropped) when the listing shows up;
//  * an applied tombstone is kept until the listing's expiry plus 24 h, and
//    the listing never comes back while it is kept.
//
// Single writer, concurrent readers. With a data directory every change is
// written through: listings/<content_id>.json and tombstones.json.
class ListingStore {
 public:
  explicit ListingStore(crypto::PublicKey server_key,
                        std::optional<std::filesystem::path> data_dir = std::nullopt);

  /// Loads persisted state, dropping entries that no longer verify.
  void load(const Clock& clock);

  MergeReport merge(std::span<const SignedListing> listings, std::span<const Tombstone> tombstones,
                    const Clock& clock);

  /// Throws Error(not_found) for an unknown id, Error(authorization) when
  /// `cert` does not own the listing, Error(rejected_parameters) when `key`
  /// does not match `cert`.
  Tombstone remove_listing(const crypto::PrivateKey& key, const crypto::CertifiedKey& cert,
                           const ContentId& id, const Clock& clock);

  /// Drops listings with expires_at <= now and tombstones past retention.
  /// Returns the number of listings removed.
  std::size_t expire(const Clock& clock);

  /// Live listings plus applied tombstones; this is what gets pushed.
  StoreSnapshot snapshot(const Clock& clock) const;

  std::optional<SignedListing> get(const ContentId& id) const;
  std::vector<SignedListing> listings() const;
  bool contains(const ContentId& id) const;
  bool is_tombstoned(const ContentId& id) const;
  std::size_t size() const;
  std::size_t pending_tombstones() const;

  /// Compares listings, applied tombstones and pending tombstones.
  bool same_state(const ListingStore& other) const;

 private:
  struct AppliedTombstone {
    Tombstone tombstone;
    std::int64_t retain_until = 0;
    Bytes owner_key_der;
    friend bool operator==(const AppliedTombstone&, const AppliedTombstone&) = default;
  };

  void merge_listing(const SignedListing& sl, const Clock& clock, MergeReport& report);
  void merge_tombstone(const Tombstone& t, const Clock& clock, MergeReport& report);
  void apply_tombstone(const Tombstone& t, const SignedListing& removed);

  void persist_listing(const SignedListing& sl) const;
  void unpersist_listing(const ContentId& id) const;
  void persist_tombstones();

  crypto::PublicKey server_key_;
  std::optional<std::filesystem::path> data_dir_;

  mutable std::shared_mutex mutex_;
  std::map<ContentId, SignedListing> listings_;
  std::map<ContentId, AppliedTombstone> tombstones_;
  std::map<ContentId, std::set<Tombstone>> pending_;
  std::map<ContentId, std::int64_t> pending_until_;
  bool tombstones_dirty_ = false;
};

}  // namespace marketpalace::market
