#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "marketpalace/common/bytes.hpp"

struct evp_pkey_st;

namespace marketpalace::crypto {

inline constexpr int kMinModulusBits = 2048;

// RSA public key. The canonical encoding is the DER SubjectPublicKeyInfo;
// fingerprints, peer ids and certifications are all computed over it.
class PublicKey {
 public:
  /// Throws Error(encoding) unless `der` is an RSA SubjectPublicKeyInfo
  /// with a modulus of at least kMinModulusBits.
  static PublicKey from_der(ByteView der);
  static PublicKey from_base64(std::string_view b64);

  const Bytes& der() const noexcept { return der_; }
  std::string base64() const { return base64_encode(der_); }
  int bits() const noexcept;
  /// SHA-256 over der().
  Digest fingerprint() const;

  evp_pkey_st* native() const noexcept { return key_.get(); }

  friend bool operator==(const PublicKey& a, const PublicKey& b) { return a.der_ == b.der_; }

 private:
  PublicKey(std::shared_ptr<evp_pkey_st> key, Bytes der);

  std::shared_ptr<evp_pkey_st> key_;
  Bytes der_;
};

class PrivateKey {
 public:
  /// PKCS#8 DER.
  static PrivateKey from_der(ByteView der);
  static PrivateKey from_pem(std::string_view pem);

  Bytes to_der() const;
  std::string to_pem() const;
  PublicKey public_key() const;
  int bits() const noexcept;

  evp_pkey_st* native() const noexcept { return key_.get(); }

 private:
  explicit PrivateKey(std::shared_ptr<evp_pkey_st> key);
  friend struct KeyPair generate_keypair(int bits);

  std::shared_ptr<evp_pkey_st> key_;
};

struct KeyPair {
  PrivateKey private_key;
  PublicKey public_key;
};

/// Throws Error(rejected_parameters) for bits < kMinModulusBits.
KeyPair generate_keypair(int bits = kMinModulusBits);

/// RSA-PSS (MGF1-SHA256, salt length 32) over SHA-256(message).
Bytes sign_detached(const PrivateKey& key, ByteView message);
/// Never throws; any malformed input yields false.
bool verify_detached(const PublicKey& key, ByteView message, ByteView signature) noexcept;

/// RSA-OAEP (SHA-256) for short secrets such as symmetric payload keys.
Bytes rsa_wrap(const PublicKey& key, ByteView secret);
/// Throws Error(decrypt_failure) when the ciphertext was not for this key.
Bytes rsa_unwrap(const PrivateKey& key, ByteView wrapped);

}  // namespace marketpalace::crypto
