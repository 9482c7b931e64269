#include "marketpalace/door/session.hpp"

#include <algorithm>

#include "marketpalace/common/error.hpp"

namespace marketpalace::door {
namespace {

constexpr std::string_view kQrPrefix = "marketpalace://register?";

bool is_token(std::string_view t) {
  return t.size() == 32 && std::all_of(t.begin(), t.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

std::string_view to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::created: return "created";
    case SessionState::attributes_verified: return "attributes-verified";
    case SessionState::completed: return "completed";
    case SessionState::expired: return "expired";
  }
  return "unknown";
}

std::string make_qr_payload(std::string_view host, std::string_view token) {
  std::string out(kQrPrefix);
  out.append("host=").append(host).append("&token=").append(token);
  return out;
}

QrPayload parse_qr_payload(std::string_view payload) {
  if (!payload.starts_with(kQrPrefix)) throw Error(Errc::parse, "not a registration URI");
  std::string_view query = payload.substr(kQrPrefix.size());
  QrPayload out;
  bool have_host = false;
  bool have_token = false;
  while (!query.empty()) {
    auto amp = query.find('&');
    std::string_view pair = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::parse, "malformed query parameter");
    std::string_view key = pair.substr(0, eq);
    std::string_view value = pair.substr(eq + 1);
    if (key == "host" && !have_host) {
      out.host = value;
      have_host = true;
    } else if (key == "token" && !have_token) {
      out.token = value;
      have_token = true;
    } else {
      throw Error(Errc::parse, "unexpected query parameter");
    }
  }
  if (!have_host || out.host.empty() || out.host.find(':') == std::string::npos) {
    throw Error(Errc::parse, "registration URI lacks host:port");
  }
  if (!have_token || !is_token(out.token)) throw Error(Errc::parse, "registration URI lacks token");
  return out;
}

}  // namespace marketpalace::door
