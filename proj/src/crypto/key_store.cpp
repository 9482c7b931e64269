#include "marketpalace/crypto/key_store.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/crypto/aead.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::crypto {
namespace {

constexpr std::size_t kSaltSize = 16;
constexpr std::size_t kCheckSize = 16;
constexpr std::string_view kCheckLabel = "marketpalace-private-key-check-v1";

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

struct DerivedKeys {
  std::array<std::uint8_t, 32> encryption{};
  std::array<std::uint8_t, 32> check{};

  ~DerivedKeys() {
    OPENSSL_cleanse(encryption.data(), encryption.size());
    OPENSSL_cleanse(check.data(), check.size());
  }
};

void derive(std::string_view passphrase, ByteView salt, std::uint32_t iterations, DerivedKeys& out) {
  std::array<std::uint8_t, 64> material{};
  if (PKCS5_PBKDF2_HMAC(passphrase.data(), static_cast<int>(passphrase.size()), salt.data(),
                        static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                        static_cast<int>(material.size()), material.data()) != 1) {
    throw Error(Errc::io, "PBKDF2 failed");
  }
  std::copy_n(material.begin(), 32, out.encryption.begin());
  std::copy_n(material.begin() + 32, 32, out.check.begin());
  OPENSSL_cleanse(material.data(), material.size());
}

std::array<std::uint8_t, kCheckSize> check_tag(const DerivedKeys& keys) {
  std::array<std::uint8_t, EVP_MAX_MD_SIZE> mac{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), keys.check.data(), static_cast<int>(keys.check.size()),
       reinterpret_cast<const unsigned char*>(kCheckLabel.data()), kCheckLabel.size(), mac.data(),
       &len);
  std::array<std::uint8_t, kCheckSize> out{};
  std::copy_n(mac.begin(), kCheckSize, out.begin());
  return out;
}

}  // namespace

Json EncryptedPrivateKey::to_json() const {
  return Json{{"ciphertext", base64_encode(ciphertext)},
              {"kdf_iterations", kdf_iterations},
              {"kdf_salt", base64_encode(kdf_salt)},
              {"nonce", base64_encode(nonce)}};
}

EncryptedPrivateKey EncryptedPrivateKey::from_json(const Json& j) {
  ObjectReader r(j, "encrypted_private_key");
  EncryptedPrivateKey e;
  e.ciphertext = r.bytes("ciphertext");
  auto iterations = r.integer("kdf_iterations");
  if (iterations <= 0 || iterations > UINT32_MAX) {
    throw Error(Errc::corrupt_data, "kdf_iterations out of range");
  }
  e.kdf_iterations = static_cast<std::uint32_t>(iterations);
  e.kdf_salt = r.bytes("kdf_salt");
  e.nonce = r.bytes("nonce");
  r.finish();
  return e;
}

void EncryptedPrivateKey::save(const std::filesystem::path& path) const {
  write_file_atomic(path, canonical_dump(to_json()) + "\n");
}

EncryptedPrivateKey EncryptedPrivateKey::load(const std::filesystem::path& path) {
  return from_json(parse_json(read_file(path)));
}

EncryptedPrivateKey encrypt_private_key(const PrivateKey& key, std::string_view passphrase,
                                        std::uint32_t iterations) {
  if (utf8_length(passphrase) < kMinPassphraseChars) {
    throw Error(Errc::rejected_parameters, "passphrase must have at least 8 characters");
  }
  if (iterations < kMinKdfIterations) {
    throw Error(Errc::rejected_parameters, "KDF iteration count below 100000");
  }
  EncryptedPrivateKey out;
  out.kdf_salt = random_bytes(kSaltSize);
  out.kdf_iterations = iterations;
  out.nonce = random_bytes(kAeadNonceSize);

  DerivedKeys keys;
  derive(passphrase, out.kdf_salt, iterations, keys);
  Bytes der = key.to_der();
  Bytes sealed = aead_seal(keys.encryption, out.nonce, der);
  OPENSSL_cleanse(der.data(), der.size());

  auto check = check_tag(keys);
  out.ciphertext.assign(check.begin(), check.end());
  out.ciphertext.insert(out.ciphertext.end(), sealed.begin(), sealed.end());
  return out;
}

PrivateKey decrypt_private_key(const EncryptedPrivateKey& enc, std::string_view passphrase) {
  if (enc.kdf_salt.size() != kSaltSize || enc.nonce.size() != kAeadNonceSize ||
      enc.kdf_iterations < kMinKdfIterations) {
    throw Error(Errc::corrupt_data, "malformed encrypted key parameters");
  }
  if (enc.ciphertext.size() < kCheckSize + kAeadTagSize) {
    throw Error(Errc::corrupt_data, "encrypted key truncated");
  }
  DerivedKeys keys;
  derive(passphrase, enc.kdf_salt, enc.kdf_iterations, keys);
  auto expected = check_tag(keys);
  if (CRYPTO_memcmp(expected.data(), enc.ciphertext.data(), kCheckSize) != 0) {
    throw Error(Errc::authentication, "wrong passphrase");
  }
  Bytes der;
  try {
    der = aead_open(keys.encryption, enc.nonce, ByteView(enc.ciphertext).subspan(kCheckSize));
  } catch (const Error&) {
    throw Error(Errc::corrupt_data, "encrypted key failed integrity check");
  }
  try {
    auto key = PrivateKey::from_der(der);
    OPENSSL_cleanse(der.data(), der.size());
    return key;
  } catch (const Error&) {
    OPENSSL_cleanse(der.data(), der.size());
    throw Error(Errc::corrupt_data, "decrypted key is not a valid RSA key");
  }
}

}  // namespace marketpalace::crypto
