#pragma once

#include "marketpalace/common/bytes.hpp"

namespace marketpalace::crypto {

inline constexpr std::size_t kAeadKeySize = 32;
inline constexpr std::size_t kAeadNonceSize = 12;
inline constexpr std::size_t kAeadTagSize = 16;

/// AES-256-GCM. Returns ciphertext || tag.
Bytes aead_seal(ByteView key, ByteView nonce, ByteView plaintext, ByteView aad = {});
/// Throws Error(decrypt_failure) when authentication fails.
Bytes aead_open(ByteView key, ByteView nonce, ByteView sealed, ByteView aad = {});

}  // namespace marketpalace::crypto
