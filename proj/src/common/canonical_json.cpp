#include "marketpalace/common/canonical_json.hpp"

#include "marketpalace/common/error.hpp"

namespace marketpalace {
namespace {

void reject_floats(const Json& v) {
  if (v.is_number_float()) throw Error(Errc::encoding, "floating point value in canonical JSON");
  if (v.is_object() || v.is_array()) {
    for (const auto& item : v) reject_floats(item);
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  reject_floats(value);
  // nlohmann::json stores objects in std::map, so keys come out sorted.
  return value.dump(-1, ' ', false, Json::error_handler_t::strict);
}

Bytes canonical_bytes(const Json& value) { return to_bytes(canonical_dump(value)); }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
}

ObjectReader::ObjectReader(const Json& object, std::string_view what)
    : object_(object), what_(what) {
  if (!object_.is_object()) throw Error(Errc::parse, what_ + ": expected JSON object");
}

const Json& ObjectReader::field(std::string_view key) {
  auto it = object_.find(key);
  if (it == object_.end()) {
    throw Error(Errc::parse, what_ + ": missing field '" + std::string(key) + "'");
  }
  seen_.emplace(key);
  return *it;
}

bool ObjectReader::has(std::string_view key) const { return object_.contains(key); }

std::string ObjectReader::string(std::string_view key) {
  const Json& v = field(key);
  if (!v.is_string()) throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected string");
  return v.get<std::string>();
}

std::int64_t ObjectReader::integer(std::string_view key) {
  const Json& v = field(key);
  if (v.is_number_integer() && !v.is_number_unsigned()) return v.get<std::int64_t>();
  if (v.is_number_unsigned() && v.get<std::uint64_t>() <= static_cast<std::uint64_t>(INT64_MAX)) {
    return static_cast<std::int64_t>(v.get<std::uint64_t>());
  }
  throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected integer");
}

std::uint64_t ObjectReader::unsigned_integer(std::string_view key) {
  const Json& v = field(key);
  if (!v.is_number_unsigned()) {
    throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected unsigned integer");
  }
  return v.get<std::uint64_t>();
}

double ObjectReader::number(std::string_view key) {
  const Json& v = field(key);
  if (!v.is_number()) throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected number");
  return v.get<double>();
}

bool ObjectReader::boolean(std::string_view key) {
  const Json& v = field(key);
  if (!v.is_boolean()) throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected boolean");
  return v.get<bool>();
}

Bytes ObjectReader::bytes(std::string_view key) {
  std::string text = string(key);
  try {
    return base64_decode(text);
  } catch (const Error&) {
    throw Error(Errc::parse, what_ + "." + std::string(key) + ": invalid base64");
  }
}

Digest ObjectReader::digest_hex(std::string_view key) {
  std::string text = string(key);
  if (!is_lower_hex_digest(text)) {
    throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected 64 lowercase hex chars");
  }
  return digest_from_hex(text);
}

const Json& ObjectReader::object(std::string_view key) {
  const Json& v = field(key);
  if (!v.is_object()) throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected object");
  return v;
}

const Json& ObjectReader::array(std::string_view key) {
  const Json& v = field(key);
  if (!v.is_array()) throw Error(Errc::parse, what_ + "." + std::string(key) + ": expected array");
  return v;
}

void ObjectReader::finish() const {
  for (auto it = object_.begin(); it != object_.end(); ++it) {
    if (!seen_.contains(it.key())) {
      throw Error(Errc::parse, what_ + ": unknown field '" + it.key() + "'");
    }
  }
}

}  // namespace marketpalace
