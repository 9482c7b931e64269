#pragma once

#include <cstdint>
#include <filesystem>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/crypto/keys.hpp"

namespace marketpalace::crypto {

// A user's public key plus the door server's signature over its DER
// encoding. Holds raw DER; a corrupted certificate is representable and
// verify_certification() rejects it.
struct CertifiedKey {
  Bytes public_key_der;
  Bytes certification;

  /// Parses public_key_der; throws Error(encoding) if malformed.
  PublicKey public_key() const { return PublicKey::from_der(public_key_der); }
  /// SHA-256 of the DER public key. Doubles as owner fingerprint and peer id.
  Digest fingerprint() const;

  Json to_json() const;
  static CertifiedKey from_json(const Json& j);

  friend bool operator==(const CertifiedKey&, const CertifiedKey&) = default;
};

CertifiedKey certify_key(const PrivateKey& server_key, const PublicKey& user_key);
/// Overload for untrusted input: throws Error(encoding) when `user_key_der`
/// is not a well-formed RSA key.
CertifiedKey certify_key(const PrivateKey& server_key, ByteView user_key_der);
bool verify_certification(const PublicKey& server_key, const CertifiedKey& cert) noexcept;

// On-disk bundle: {certification, created_at, modulus_bits, public_key}.
struct KeyBundle {
  CertifiedKey cert;
  std::int64_t created_at = 0;

  Json to_json() const;
  static KeyBundle from_json(const Json& j);
  void save(const std::filesystem::path& path) const;
  static KeyBundle load(const std::filesystem::path& path);
};

}  // namespace marketpalace::crypto
