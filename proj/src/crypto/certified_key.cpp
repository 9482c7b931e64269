#include "marketpalace/crypto/certified_key.hpp"

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::crypto {

Digest CertifiedKey::fingerprint() const { return sha256(public_key_der); }

Json CertifiedKey::to_json() const {
  return Json{{"certification", base64_encode(certification)},
              {"public_key", base64_encode(public_key_der)}};
}

CertifiedKey CertifiedKey::from_json(const Json& j) {
  ObjectReader r(j, "certified_key");
  CertifiedKey c;
  c.certification = r.bytes("certification");
  c.public_key_der = r.bytes("public_key");
  r.finish();
  return c;
}

CertifiedKey certify_key(const PrivateKey& server_key, const PublicKey& user_key) {
  return CertifiedKey{user_key.der(), sign_detached(server_key, user_key.der())};
}

CertifiedKey certify_key(const PrivateKey& server_key, ByteView user_key_der) {
  return certify_key(server_key, PublicKey::from_der(user_key_der));
}

bool verify_certification(const PublicKey& server_key, const CertifiedKey& cert) noexcept {
  try {
    // Parsing enforces RSA >= 2048 bits and canonical DER.
    (void)cert.public_key();
  } catch (const Error&) {
    return false;
  }
  return verify_detached(server_key, cert.public_key_der, cert.certification);
}

Json KeyBundle::to_json() const {
  Json j = cert.to_json();
  j["created_at"] = created_at;
  j["modulus_bits"] = cert.public_key().bits();
  return j;
}

KeyBundle KeyBundle::from_json(const Json& j) {
  ObjectReader r(j, "key_bundle");
  KeyBundle b;
  b.cert.certification = r.bytes("certification");
  b.cert.public_key_der = r.bytes("public_key");
  b.created_at = r.integer("created_at");
  if (r.has("modulus_bits")) {
    auto bits = r.integer("modulus_bits");
    if (bits != b.cert.public_key().bits()) {
      throw Error(Errc::corrupt_data, "key bundle modulus_bits does not match key");
    }
  }
  r.finish();
  return b;
}

void KeyBundle::save(const std::filesystem::path& path) const {
  write_file_atomic(path, canonical_dump(to_json()) + "\n");
}

KeyBundle KeyBundle::load(const std::filesystem::path& path) {
  return from_json(parse_json(read_file(path)));
}

}  // namespace marketpalace::crypto
