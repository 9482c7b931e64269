#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "marketpalace/common/canonical_json.hpp"

namespace marketpalace::door {

struct TlsConfig {
  bool enabled = false;
  std::string cert_path;
  std::string key_path;
};

struct IssuerKey {
  std::string issuer_id;
  std::string public_key;  // base64 DER SubjectPublicKeyInfo
};

struct DoorConfig {
  std::string listen_addr = "127.0.0.1:8080";
  std::string server_key_path = "server_key.pem";
  std::vector<IssuerKey> issuer_keys;
  std::int64_t session_ttl_s = 300;
  TlsConfig tls;
  // Not part of the minimal schema; defaults next to the server key.
  std::string hash_store_path;
  std::string advertised_host;

  Json to_json() const;
  static DoorConfig from_json(const Json& j);
  static DoorConfig load(const std::filesystem::path& path);
};

}  // namespace marketpalace::door
