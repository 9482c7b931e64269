#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "marketpalace/common/canonical_json.hpp"

namespace marketpalace::node {

struct NodeConfig {
  std::string listen_addr = "127.0.0.1:7600";
  std::string api_addr = "127.0.0.1:7700";
  std::vector<std::string> bootstrap_addrs;
  std::string door_server_url = "http://127.0.0.1:8080";
  std::string server_public_key_path = "server_public_key.json";
  std::string key_bundle_path = "key_bundle.json";
  double timer_period_s = 90.0;
  std::size_t k = 20;
  std::string data_dir = "data";
  // Optional extensions.
  std::string private_key_path;  // defaults to <data_dir>/private_key.json
  std::string advertised_host;   // defaults to the listen host
  bool allow_remote_api = false;

  /// Throws Error(validation).
  void validate() const;
  Json to_json() const;
  static NodeConfig from_json(const Json& j);
  /// Parses and validates; relative paths resolve against the file's directory.
  static NodeConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

bool is_loopback_host(std::string_view host) noexcept;

}  // namespace marketpalace::node
