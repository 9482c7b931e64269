#include "marketpalace/market/listing.hpp"

#include <algorithm>

#include "marketpalace/common/error.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::market {

std::size_t utf8_chars(std::string_view s) noexcept {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool is_currency_code(std::string_view code) noexcept {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

void Listing::validate() const {
  if (title.empty()) throw Error(Errc::validation, "title must not be empty");
  if (utf8_chars(title) > kMaxTitleChars) throw Error(Errc::validation, "title exceeds 140 characters");
  if (utf8_chars(description) > kMaxDescriptionChars) {
    throw Error(Errc::validation, "description exceeds 4096 characters");
  }
  if (price_amount < 0) throw Error(Errc::validation, "price_amount must be non-negative");
  if (!is_currency_code(currency)) throw Error(Errc::validation, "currency must be an ISO-4217 code");
  if (expires_at <= created_at) throw Error(Errc::validation, "expires_at must be after created_at");
}

Json Listing::to_json() const {
  return Json{{"created_at", created_at},
              {"currency", currency},
              {"description", description},
              {"expires_at", expires_at},
              {"nonce", nonce},
              {"owner_fingerprint", hex_encode(owner_fingerprint)},
              {"price_amount", price_amount},
              {"title", title}};
}

Listing Listing::from_json(const Json& j) {
  ObjectReader r(j, "listing");
  Listing l;
  l.created_at = r.integer("created_at");
  l.currency = r.string("currency");
  l.description = r.string("description");
  l.expires_at = r.integer("expires_at");
  l.nonce = r.unsigned_integer("nonce");
  l.owner_fingerprint = r.digest_hex("owner_fingerprint");
  l.price_amount = r.integer("price_amount");
  l.title = r.string("title");
  r.finish();
  return l;
}

ContentId Listing::content_id() const { return ContentId(crypto::sha256(canonical_bytes(to_json()))); }

Json SignedListing::to_json() const {
  return Json{{"content_id", content_id.hex()},
              {"listing", listing.to_json()},
              {"owner_cert", owner_cert.to_json()},
              {"signature", base64_encode(signature)}};
}

SignedListing SignedListing::from_json(const Json& j) {
  ObjectReader r(j, "signed_listing");
  SignedListing sl;
  sl.content_id = ContentId(r.digest_hex("content_id"));
  sl.listing = Listing::from_json(r.object("listing"));
  sl.owner_cert = crypto::CertifiedKey::from_json(r.object("owner_cert"));
  sl.signature = r.bytes("signature");
  r.finish();
  return sl;
}

SignedListing create_signed_listing(const crypto::PrivateKey& key, const crypto::CertifiedKey& cert,
                                    const ListingDraft& draft, const Clock& clock) {
  if (cert.public_key_der != key.public_key().der()) {
    throw Error(Errc::rejected_parameters, "certificate does not belong to the signing key");
  }
  if (draft.ttl_s <= 0) throw Error(Errc::validation, "ttl_s must be positive");
  Listing l;
  l.title = draft.title;
  l.description = draft.description;
  l.price_amount = draft.price_amount;
  l.currency = draft.currency;
  l.owner_fingerprint = cert.fingerprint();
  l.created_at = clock.now();
  l.expires_at = l.created_at + draft.ttl_s;
  l.nonce = crypto::random_u64();
  l.validate();

  SignedListing sl;
  sl.content_id = l.content_id();
  sl.listing = std::move(l);
  sl.owner_cert = cert;
  sl.signature = crypto::sign_detached(key, sl.content_id.digest());
  return sl;
}

std::string_view to_string(ListingCheck c) noexcept {
  switch (c) {
    case ListingCheck::valid: return "valid";
    case ListingCheck::bad_cert: return "bad-cert";
    case ListingCheck::bad_signature: return "bad-signature";
    case ListingCheck::fingerprint_mismatch: return "fingerprint-mismatch";
    case ListingCheck::expired: return "expired";
  }
  return "unknown";
}

ListingCheck verify_signed_listing(const crypto::PublicKey& server_key, const SignedListing& sl,
                                   const Clock& clock) {
  if (!crypto::verify_certification(server_key, sl.owner_cert)) return ListingCheck::bad_cert;
  if (sl.owner_cert.fingerprint() != sl.listing.owner_fingerprint) {
    return ListingCheck::fingerprint_mismatch;
  }
  if (sl.listing.content_id() != sl.content_id) return ListingCheck::bad_signature;
  if (!crypto::verify_detached(sl.owner_cert.public_key(), sl.content_id.digest(), sl.signature)) {
    return ListingCheck::bad_signature;
  }
  if (sl.listing.expires_at <= clock.now()) return ListingCheck::expired;
  return ListingCheck::valid;
}

Bytes Tombstone::signed_material() const {
  return canonical_bytes(Json{{"content_id", content_id.hex()}, {"removed_at", removed_at}});
}

Json Tombstone::to_json() const {
  return Json{{"content_id", content_id.hex()},
              {"removed_at", removed_at},
              {"signature", base64_encode(signature)}};
}

Tombstone Tombstone::from_json(const Json& j) {
  ObjectReader r(j, "tombstone");
  Tombstone t;
  t.content_id = ContentId(r.digest_hex("content_id"));
  t.removed_at = r.integer("removed_at");
  t.signature = r.bytes("signature");
  r.finish();
  return t;
}

bool Tombstone::verify(const crypto::PublicKey& owner_key) const noexcept {
  try {
    return crypto::verify_detached(owner_key, signed_material(), signature);
  } catch (...) {
    return false;
  }
}

Tombstone make_tombstone(const crypto::PrivateKey& owner_key, const ContentId& id,
                         std::int64_t removed_at) {
  Tombstone t{id, removed_at, {}};
  t.signature = crypto::sign_detached(owner_key, t.signed_material());
  return t;
}

}  // namespace marketpalace::market
