#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace marketpalace {

enum class Errc {
  rejected_parameters,
  encoding,
  authentication,
  corrupt_data,
  bad_cert,
  bad_signature,
  decrypt_failure,
  session,
  validation,
  not_found,
  authorization,
  parse,
  unreachable,
  bootstrap_failed,
  oversize,
  incomplete_frame,
  io,
};

std::string_view to_string(Errc code) noexcept;
/// Inverse of to_string.
std::optional<Errc> errc_from_string(std::string_view name) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (HTTP layers, CLI exit codes) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace marketpalace
