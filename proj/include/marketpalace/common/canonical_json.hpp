#pragma once

// Canonical JSON: UTF-8, object keys sorted bytewise, no insignificant
// whitespace, integers in decimal, byte strings as padded base64. These
// bytes are what gets hashed and signed.

#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "marketpalace/common/bytes.hpp"

namespace marketpalace {

using Json = nlohmann::json;

/// Serializes `value` canonically. Floating point numbers are refused:
/// nothing signed in this system carries them.
std::string canonical_dump(const Json& value);
Bytes canonical_bytes(const Json& value);

/// Parses text and throws Error(parse) on any syntax or UTF-8 problem.
Json parse_json(std::string_view text);

// Typed, strict view over a JSON object. Tracks which keys were read so a
// decoder can refuse unknown fields with finish().
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string_view what);
  ObjectReader(Json&&, std::string_view) = delete;

  std::string string(std::string_view key);
  std::int64_t integer(std::string_view key);
  std::uint64_t unsigned_integer(std::string_view key);
  /// Any JSON number. Only for data that is never signed, like config files.
  double number(std::string_view key);
  bool boolean(std::string_view key);
  Bytes bytes(std::string_view key);
  Digest digest_hex(std::string_view key);
  const Json& object(std::string_view key);
  const Json& array(std::string_view key);
  bool has(std::string_view key) const;

  /// Throws Error(parse) if the object carries keys that were never read.
  void finish() const;

 private:
  const Json& field(std::string_view key);

  const Json& object_;
  std::string what_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace marketpalace
