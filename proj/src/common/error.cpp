#include "marketpalace/common/error.hpp"

namespace marketpalace {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::rejected_parameters: return "rejected-parameters";
    case Errc::encoding: return "encoding";
    case Errc::authentication: return "authentication-failure";
    case Errc::corrupt_data: return "corrupt-data";
    case Errc::bad_cert: return "bad-cert";
    case Errc::bad_signature: return "bad-signature";
    case Errc::decrypt_failure: return "decrypt-failure";
    case Errc::session: return "session";
    case Errc::validation: return "validation";
    case Errc::not_found: return "not-found";
    case Errc::authorization: return "authorization";
    case Errc::parse: return "parse";
    case Errc::unreachable: return "unreachable";
    case Errc::bootstrap_failed: return "bootstrap-failed";
    case Errc::oversize: return "oversize";
    case Errc::incomplete_frame: return "incomplete-frame";
    case Errc::io: return "io";
  }
  return "unknown";
}

std::optional<Errc> errc_from_string(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(Errc::io); ++i) {
    auto c = static_cast<Errc>(i);
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace marketpalace
