#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/crypto/keys.hpp"

namespace marketpalace::crypto {

inline constexpr std::uint32_t kMinKdfIterations = 100'000;
inline constexpr std::uint32_t kDefaultKdfIterations = 200'000;
inline constexpr std::size_t kMinPassphraseChars = 8;

// Passphrase-protected PKCS#8 private key.
//
// PBKDF2-HMAC-SHA256(passphrase, kdf_salt, kdf_iterations) yields 64 bytes:
// the first 32 key AES-256-GCM, the last 32 key an HMAC whose 16-byte tag
// over a fixed label prefixes `ciphertext`. The prefix lets decryption tell
// a wrong passphrase apart from damaged ciphertext.
struct EncryptedPrivateKey {
  Bytes ciphertext;
  Bytes kdf_salt;
  std::uint32_t kdf_iterations = 0;
  Bytes nonce;

  Json to_json() const;
  static EncryptedPrivateKey from_json(const Json& j);
  void save(const std::filesystem::path& path) const;
  static EncryptedPrivateKey load(const std::filesystem::path& path);
};

/// Throws Error(rejected_parameters) if the passphrase has fewer than 8
/// code points or iterations < kMinKdfIterations.
EncryptedPrivateKey encrypt_private_key(const PrivateKey& key, std::string_view passphrase,
                                        std::uint32_t iterations = kDefaultKdfIterations);

/// Error(authentication) for a wrong passphrase, Error(corrupt_data) when
/// the stored bytes are damaged.
PrivateKey decrypt_private_key(const EncryptedPrivateKey& enc, std::string_view passphrase);

}  // namespace marketpalace::crypto
