#include "marketpalace/crypto/envelope.hpp"

#include <openssl/crypto.h>

#include "marketpalace/common/error.hpp"
#include "marketpalace/crypto/aead.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::crypto {

Bytes Envelope::signed_material() const {
  return canonical_bytes(Json{{"ciphertext", base64_encode(ciphertext)},
                              {"sender_cert", sender_cert.to_json()},
                              {"timestamp", timestamp},
                              {"wrapped_key", base64_encode(wrapped_key)}});
}

Json Envelope::to_json() const {
  return Json{{"ciphertext", base64_encode(ciphertext)},
              {"sender_cert", sender_cert.to_json()},
              {"signature", base64_encode(signature)},
              {"timestamp", timestamp},
              {"wrapped_key", base64_encode(wrapped_key)}};
}

Envelope Envelope::from_json(const Json& j) {
  ObjectReader r(j, "envelope");
  Envelope e;
  e.ciphertext = r.bytes("ciphertext");
  e.sender_cert = CertifiedKey::from_json(r.object("sender_cert"));
  e.signature = r.bytes("signature");
  e.timestamp = r.integer("timestamp");
  e.wrapped_key = r.bytes("wrapped_key");
  r.finish();
  return e;
}

Envelope seal_envelope(const PrivateKey& sender_key, const CertifiedKey& sender_cert,
                       const PublicKey& receiver_key, ByteView plaintext, std::int64_t timestamp) {
  if (sender_cert.public_key_der != sender_key.public_key().der()) {
    throw Error(Errc::rejected_parameters, "sender certificate does not match sender key");
  }
  Bytes payload_key = random_bytes(kAeadKeySize);
  Bytes nonce = random_bytes(kAeadNonceSize);

  Envelope env;
  env.sender_cert = sender_cert;
  env.timestamp = timestamp;
  env.ciphertext = nonce;
  Bytes sealed = aead_seal(payload_key, nonce, plaintext);
  env.ciphertext.insert(env.ciphertext.end(), sealed.begin(), sealed.end());
  env.wrapped_key = rsa_wrap(receiver_key, payload_key);
  OPENSSL_cleanse(payload_key.data(), payload_key.size());
  env.signature = sign_detached(sender_key, env.signed_material());
  return env;
}

OpenedEnvelope open_envelope(const PrivateKey& receiver_key, const PublicKey& server_key,
                             const Envelope& envelope) {
  if (envelope.ciphertext.size() < kAeadNonceSize + kAeadTagSize) {
    throw Error(Errc::decrypt_failure, "ciphertext too short");
  }
  Bytes payload_key = rsa_unwrap(receiver_key, envelope.wrapped_key);
  if (payload_key.size() != kAeadKeySize) {
    throw Error(Errc::decrypt_failure, "unexpected payload key length");
  }
  ByteView ct(envelope.ciphertext);
  Bytes plaintext = aead_open(payload_key, ct.first(kAeadNonceSize), ct.subspan(kAeadNonceSize));
  OPENSSL_cleanse(payload_key.data(), payload_key.size());

  if (!verify_certification(server_key, envelope.sender_cert)) {
    throw Error(Errc::bad_cert, "sender key is not certified by the door server");
  }
  PublicKey sender = envelope.sender_cert.public_key();
  if (!verify_detached(sender, envelope.signed_material(), envelope.signature)) {
    throw Error(Errc::bad_signature, "envelope signature does not verify");
  }
  return OpenedEnvelope{std::move(plaintext), std::move(sender)};
}

}  // namespace marketpalace::crypto
