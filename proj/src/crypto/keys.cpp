#include "marketpalace/crypto/keys.hpp"

#include <openssl/bio.h>
#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <map>
#include <mutex>

#include "marketpalace/common/error.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::crypto {
namespace {

std::shared_ptr<EVP_PKEY> adopt(EVP_PKEY* key) { return {key, EVP_PKEY_free}; }

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const noexcept { EVP_PKEY_CTX_free(c); }
};
struct BioDeleter {
  void operator()(BIO* b) const noexcept { BIO_free(b); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;

bool is_rsa(const EVP_PKEY* key) { return EVP_PKEY_base_id(key) == EVP_PKEY_RSA; }

// Validated keys by canonical DER; emptied when it reaches kCapacity.
class ParsedKeyCache {
 public:
  static constexpr std::size_t kCapacity = 4096;

  std::shared_ptr<EVP_PKEY> find(ByteView der) {
    std::lock_guard lock(mutex_);
    auto it = keys_.find(der);
    return it == keys_.end() ? nullptr : it->second;
  }

  void insert(const Bytes& der, std::shared_ptr<EVP_PKEY> key) {
    std::lock_guard lock(mutex_);
    if (keys_.size() >= kCapacity) keys_.clear();
    keys_.emplace(der, std::move(key));
  }

 private:
  struct Less {
    using is_transparent = void;
    bool operator()(ByteView a, ByteView b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
  };
  std::mutex mutex_;
  std::map<Bytes, std::shared_ptr<EVP_PKEY>, Less> keys_;
};

ParsedKeyCache& parsed_keys() {
  static ParsedKeyCache cache;
  return cache;
}

Bytes encode_spki(EVP_PKEY* key) {
  int len = i2d_PUBKEY(key, nullptr);
  if (len <= 0) throw Error(Errc::encoding, "cannot encode public key");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PUBKEY(key, &p);
  return out;
}

bool configure_pss(EVP_PKEY_CTX* pctx) {
  return EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) > 0 &&
         EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_DIGEST) > 0 &&
         EVP_PKEY_CTX_set_rsa_mgf1_md(pctx, EVP_sha256()) > 0;
}

bool configure_oaep(EVP_PKEY_CTX* pctx) {
  return EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_OAEP_PADDING) > 0 &&
         EVP_PKEY_CTX_set_rsa_oaep_md(pctx, EVP_sha256()) > 0 &&
         EVP_PKEY_CTX_set_rsa_mgf1_md(pctx, EVP_sha256()) > 0;
}

}  // namespace

PublicKey::PublicKey(std::shared_ptr<evp_pkey_st> key, Bytes der)
    : key_(std::move(key)), der_(std::move(der)) {}

PublicKey PublicKey::from_der(ByteView der) {
  if (auto cached = parsed_keys().find(der)) return PublicKey(std::move(cached), Bytes(der.begin(), der.end()));
  const unsigned char* p = der.data();
  EVP_PKEY* raw = d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size()));
  if (raw == nullptr) throw Error(Errc::encoding, "malformed public key");
  auto key = adopt(raw);
  if (p != der.data() + der.size()) throw Error(Errc::encoding, "trailing bytes after public key");
  if (!is_rsa(raw)) throw Error(Errc::encoding, "public key is not RSA");
  if (EVP_PKEY_get_bits(raw) < kMinModulusBits) {
    throw Error(Errc::encoding, "RSA modulus below 2048 bits");
  }
  // Only canonical DER is accepted.
  Bytes canonical = encode_spki(raw);
  if (canonical.size() != der.size() || !std::equal(canonical.begin(), canonical.end(), der.begin())) {
    throw Error(Errc::encoding, "non-canonical public key encoding");
  }
  parsed_keys().insert(canonical, key);
  return PublicKey(std::move(key), std::move(canonical));
}

PublicKey PublicKey::from_base64(std::string_view b64) {
  Bytes der;
  try {
    der = base64_decode(b64);
  } catch (const Error&) {
    throw Error(Errc::encoding, "public key is not valid base64");
  }
  return from_der(der);
}

int PublicKey::bits() const noexcept { return EVP_PKEY_get_bits(key_.get()); }

Digest PublicKey::fingerprint() const { return sha256(der_); }

PrivateKey::PrivateKey(std::shared_ptr<evp_pkey_st> key) : key_(std::move(key)) {}

PrivateKey PrivateKey::from_der(ByteView der) {
  const unsigned char* p = der.data();
  EVP_PKEY* raw = d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(der.size()));
  if (raw == nullptr) throw Error(Errc::encoding, "malformed private key");
  auto key = adopt(raw);
  if (!is_rsa(raw)) throw Error(Errc::encoding, "private key is not RSA");
  if (EVP_PKEY_get_bits(raw) < kMinModulusBits) {
    throw Error(Errc::encoding, "RSA modulus below 2048 bits");
  }
  return PrivateKey(std::move(key));
}

PrivateKey PrivateKey::from_pem(std::string_view pem) {
  std::unique_ptr<BIO, BioDeleter> bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
  EVP_PKEY* raw = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
  if (raw == nullptr) throw Error(Errc::encoding, "malformed PEM private key");
  auto key = adopt(raw);
  if (!is_rsa(raw) || EVP_PKEY_get_bits(raw) < kMinModulusBits) {
    throw Error(Errc::encoding, "private key must be RSA with at least 2048 bits");
  }
  return PrivateKey(std::move(key));
}

Bytes PrivateKey::to_der() const {
  int len = i2d_PrivateKey(key_.get(), nullptr);
  if (len <= 0) throw Error(Errc::encoding, "cannot encode private key");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PrivateKey(key_.get(), &p);
  return out;
}

std::string PrivateKey::to_pem() const {
  std::unique_ptr<BIO, BioDeleter> bio(BIO_new(BIO_s_mem()));
  if (PEM_write_bio_PrivateKey(bio.get(), key_.get(), nullptr, nullptr, 0, nullptr, nullptr) != 1) {
    throw Error(Errc::encoding, "cannot encode private key as PEM");
  }
  char* data = nullptr;
  long len = BIO_get_mem_data(bio.get(), &data);
  return std::string(data, static_cast<std::size_t>(len));
}

PublicKey PrivateKey::public_key() const {
  Bytes der = encode_spki(key_.get());
  return PublicKey::from_der(der);
}

int PrivateKey::bits() const noexcept { return EVP_PKEY_get_bits(key_.get()); }

KeyPair generate_keypair(int bits) {
  if (bits < kMinModulusBits) {
    throw Error(Errc::rejected_parameters, "RSA modulus must be at least 2048 bits");
  }
  EVP_PKEY* raw = EVP_RSA_gen(static_cast<unsigned int>(bits));
  if (raw == nullptr) throw Error(Errc::io, "RSA key generation failed");
  PrivateKey priv(adopt(raw));
  PublicKey pub = priv.public_key();
  return KeyPair{std::move(priv), std::move(pub)};
}

Bytes sign_detached(const PrivateKey& key, ByteView message) {
  MdCtx ctx(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!ctx || EVP_DigestSignInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key.native()) != 1 ||
      !configure_pss(pctx)) {
    throw Error(Errc::io, "signature setup failed");
  }
  std::size_t len = 0;
  if (EVP_DigestSign(ctx.get(), nullptr, &len, message.data(), message.size()) != 1) {
    throw Error(Errc::io, "signature failed");
  }
  Bytes sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1) {
    throw Error(Errc::io, "signature failed");
  }
  sig.resize(len);
  return sig;
}

bool verify_detached(const PublicKey& key, ByteView message, ByteView signature) noexcept {
  MdCtx ctx(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key.native()) != 1 ||
      !configure_pss(pctx)) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

Bytes rsa_wrap(const PublicKey& key, ByteView secret) {
  PkeyCtx ctx(EVP_PKEY_CTX_new(key.native(), nullptr));
  if (!ctx || EVP_PKEY_encrypt_init(ctx.get()) != 1 || !configure_oaep(ctx.get())) {
    throw Error(Errc::io, "RSA-OAEP setup failed");
  }
  std::size_t len = 0;
  if (EVP_PKEY_encrypt(ctx.get(), nullptr, &len, secret.data(), secret.size()) != 1) {
    throw Error(Errc::io, "RSA-OAEP failed");
  }
  Bytes out(len);
  if (EVP_PKEY_encrypt(ctx.get(), out.data(), &len, secret.data(), secret.size()) != 1) {
    throw Error(Errc::io, "RSA-OAEP failed");
  }
  out.resize(len);
  return out;
}

Bytes rsa_unwrap(const PrivateKey& key, ByteView wrapped) {
  PkeyCtx ctx(EVP_PKEY_CTX_new(key.native(), nullptr));
  if (!ctx || EVP_PKEY_decrypt_init(ctx.get()) != 1 || !configure_oaep(ctx.get())) {
    throw Error(Errc::io, "RSA-OAEP setup failed");
  }
  std::size_t len = 0;
  if (EVP_PKEY_decrypt(ctx.get(), nullptr, &len, wrapped.data(), wrapped.size()) != 1) {
    throw Error(Errc::decrypt_failure, "payload key not addressed to this key");
  }
  Bytes out(len);
  if (EVP_PKEY_decrypt(ctx.get(), out.data(), &len, wrapped.data(), wrapped.size()) != 1) {
    throw Error(Errc::decrypt_failure, "payload key not addressed to this key");
  }
  out.resize(len);
  return out;
}

}  // namespace marketpalace::crypto
