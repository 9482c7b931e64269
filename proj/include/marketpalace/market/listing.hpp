#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"

namespace marketpalace::market {

inline constexpr std::size_t kMaxTitleChars = 140;
inline constexpr std::size_t kMaxDescriptionChars = 4096;
inline constexpr std::int64_t kDefaultListingTtlSeconds = 7 * 24 * 3600;
inline constexpr std::int64_t kTombstoneGraceSeconds = 24 * 3600;

/// SHA-256 of a listing's canonical encoding; lowercase hex on the wire.
class ContentId {
 public:
  ContentId() = default;
  explicit ContentId(const Digest& d) : digest_(d) {}
  /// Throws Error(encoding) unless `hex` is 64 lowercase hex chars.
  static ContentId from_hex(std::string_view hex) { return ContentId(digest_from_hex(hex)); }

  const Digest& digest() const noexcept { return digest_; }
  std::string hex() const { return hex_encode(digest_); }

  friend auto operator<=>(const ContentId&, const ContentId&) = default;

 private:
  Digest digest_{};
};

/// Counts UTF-8 code points.
std::size_t utf8_chars(std::string_view s) noexcept;
bool is_currency_code(std::string_view code) noexcept;

// Canonical form (sorted keys):
//   {created_at, currency, description, expires_at, nonce, owner_fingerprint,
//    price_amount, title}
// owner_fingerprint is lowercase hex; nonce is an unsigned 64-bit integer.
struct Listing {
  std::string title;
  std::string description;
  std::int64_t price_amount = 0;
  std::string currency;
  Digest owner_fingerprint{};
  std::int64_t created_at = 0;
  std::int64_t expires_at = 0;
  std::uint64_t nonce = 0;

  /// Throws Error(validation) on any bound violation.
  void validate() const;
  Json to_json() const;
  static Listing from_json(const Json& j);
  ContentId content_id() const;

  friend bool operator==(const Listing&, const Listing&) = default;
};

struct SignedListing {
  Listing listing;
  ContentId content_id;
  crypto::CertifiedKey owner_cert;
  Bytes signature;  // owner's signature over the 32 raw content id bytes

  Json to_json() const;
  static SignedListing from_json(const Json& j);

  friend bool operator==(const SignedListing&, const SignedListing&) = default;
};

struct ListingDraft {
  std::string title;
  std::string description;
  std::int64_t price_amount = 0;
  std::string currency;
  std::int64_t ttl_s = kDefaultListingTtlSeconds;
};

/// Throws Error(validation) for field-bound violations and
/// Error(rejected_parameters) if `cert` is not for `key`.
SignedListing create_signed_listing(const crypto::PrivateKey& key, const crypto::CertifiedKey& cert,
                                    const ListingDraft& draft, const Clock& clock);

enum class ListingCheck { valid, bad_cert, bad_signature, fingerprint_mismatch, expired };

std::string_view to_string(ListingCheck c) noexcept;

/// Checks in order: owner certificate, fingerprint, content id + signature,
/// expiry. Reports the first failure.
ListingCheck verify_signed_listing(const crypto::PublicKey& server_key, const SignedListing& sl,
                                   const Clock& clock);

// Signed removal marker. Signature covers canonical {content_id, removed_at}
// and verifies only under the removed listing's owner key.
struct Tombstone {
  ContentId content_id;
  std::int64_t removed_at = 0;
  Bytes signature;

  Bytes signed_material() const;
  Json to_json() const;
  static Tombstone from_json(const Json& j);
  bool verify(const crypto::PublicKey& owner_key) const noexcept;

  friend auto operator<=>(const Tombstone&, const Tombstone&) = default;
};

Tombstone make_tombstone(const crypto::PrivateKey& owner_key, const ContentId& id,
                         std::int64_t removed_at);

}  // namespace marketpalace::market

template <>
struct std::hash<marketpalace::market::ContentId> {
  std::size_t operator()(const marketpalace::market::ContentId& id) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | id.digest()[static_cast<std::size_t>(i)];
    return h;
  }
};
