#include "marketpalace/crypto/aead.hpp"

#include <openssl/evp.h>

#include <memory>

#include "marketpalace/common/error.hpp"

namespace marketpalace::crypto {
namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const noexcept { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

void check_params(ByteView key, ByteView nonce) {
  if (key.size() != kAeadKeySize || nonce.size() != kAeadNonceSize) {
    throw Error(Errc::rejected_parameters, "AES-256-GCM needs a 32-byte key and 12-byte nonce");
  }
}

}  // namespace

Bytes aead_seal(ByteView key, ByteView nonce, ByteView plaintext, ByteView aad) {
  check_params(key, nonce);
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    throw Error(Errc::io, "AES-GCM init failed");
  }
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    throw Error(Errc::io, "AES-GCM aad failed");
  }
  Bytes out(plaintext.size() + kAeadTagSize);
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw Error(Errc::io, "AES-GCM encrypt failed");
  }
  int total = len;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    throw Error(Errc::io, "AES-GCM final failed");
  }
  total += len;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagSize, out.data() + total) != 1) {
    throw Error(Errc::io, "AES-GCM tag failed");
  }
  out.resize(static_cast<std::size_t>(total) + kAeadTagSize);
  return out;
}

Bytes aead_open(ByteView key, ByteView nonce, ByteView sealed, ByteView aad) {
  check_params(key, nonce);
  if (sealed.size() < kAeadTagSize) throw Error(Errc::decrypt_failure, "ciphertext shorter than tag");
  std::size_t body = sealed.size() - kAeadTagSize;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    throw Error(Errc::io, "AES-GCM init failed");
  }
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    throw Error(Errc::io, "AES-GCM aad failed");
  }
  Bytes out(body);
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)) != 1) {
    throw Error(Errc::decrypt_failure, "AES-GCM decrypt failed");
  }
  int total = len;
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagSize, tag.data()) != 1 ||
      EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    throw Error(Errc::decrypt_failure, "authentication tag mismatch");
  }
  out.resize(static_cast<std::size_t>(total + len));
  return out;
}

}  // namespace marketpalace::crypto
