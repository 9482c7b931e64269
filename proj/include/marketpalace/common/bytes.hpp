#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace marketpalace {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 32-byte SHA-256 output. Used for content ids, fingerprints and peer ids.
using Digest = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(ByteView b) {
  return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

std::string hex_encode(ByteView data);
/// Accepts upper or lower case; throws Error(encoding) on odd length or bad digit.
Bytes hex_decode(std::string_view hex);
/// Strict: exactly 64 lowercase hex characters.
Digest digest_from_hex(std::string_view hex);
bool is_lower_hex_digest(std::string_view hex) noexcept;

/// Standard alphabet with padding.
std::string base64_encode(ByteView data);
/// Rejects whitespace, missing padding and non-canonical trailing bits.
Bytes base64_decode(std::string_view text);

}  // namespace marketpalace
