#pragma once

#include <cstdint>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"

namespace marketpalace::crypto {

// Encrypted, sender-authenticated direct message.
//
//   ciphertext  = nonce(12) || AES-256-GCM(payload_key, plaintext) || tag(16)
//   wrapped_key = RSA-OAEP-SHA256(receiver, payload_key)
//   signature   = sign(sender, canonical{ciphertext, sender_cert, timestamp, wrapped_key})
struct Envelope {
  Bytes ciphertext;
  Bytes wrapped_key;
  CertifiedKey sender_cert;
  Bytes signature;
  std::int64_t timestamp = 0;

  /// Canonical bytes covered by `signature`.
  Bytes signed_material() const;

  Json to_json() const;
  static Envelope from_json(const Json& j);

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

struct OpenedEnvelope {
  Bytes plaintext;
  PublicKey sender;
};

/// Throws Error(rejected_parameters) if `sender_cert` is not for `sender_key`.
Envelope seal_envelope(const PrivateKey& sender_key, const CertifiedKey& sender_cert,
                       const PublicKey& receiver_key, ByteView plaintext, std::int64_t timestamp);

/// Checks run in order: decrypt, sender certificate, envelope signature.
/// The first failure throws Error(decrypt_failure), Error(bad_cert) or
/// Error(bad_signature) respectively.
OpenedEnvelope open_envelope(const PrivateKey& receiver_key, const PublicKey& server_key,
                             const Envelope& envelope);

}  // namespace marketpalace::crypto
