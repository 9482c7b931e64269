#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "marketpalace/common/bytes.hpp"

namespace marketpalace::door {

enum class SessionState { created, attributes_verified, completed, expired };

std::string_view to_string(SessionState s) noexcept;

// Registration session. Moves created -> attributes_verified -> completed;
// any state except completed may move to expired.
struct SessionToken {
  std::string token;  // 32 lowercase hex chars (128 random bits)
  SessionState state = SessionState::created;
  std::int64_t created_at = 0;
  std::optional<Digest> attribute_hash;  // set iff state >= attributes_verified
};

/// marketpalace://register?host=<host:port>&token=<hex>
std::string make_qr_payload(std::string_view host, std::string_view token);

struct QrPayload {
  std::string host;
  std::string token;
};

/// Throws Error(parse) for anything not produced by make_qr_payload.
QrPayload parse_qr_payload(std::string_view payload);

}  // namespace marketpalace::door
