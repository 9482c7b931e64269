#include "marketpalace/node/config.hpp"

#include <cmath>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/common/http_util.hpp"

namespace marketpalace::node {

bool is_loopback_host(std::string_view host) noexcept {
  return host == "localhost" || host == "::1" || host.starts_with("127.");
}

void NodeConfig::validate() const {
  if (!std::isfinite(timer_period_s) || timer_period_s <= 0) {
    throw Error(Errc::validation, "timer_period_s must be positive");
  }
  if (k < 1) throw Error(Errc::validation, "k must be at least 1");
  try {
    http::split_host_port(listen_addr);
    auto [api_host, api_port] = http::split_host_port(api_addr);
    if (!allow_remote_api && !is_loopback_host(api_host)) {
      throw Error(Errc::validation, "api_addr must be a loopback address unless allow_remote_api is set");
    }
    for (const auto& b : bootstrap_addrs) http::split_host_port(b);
  } catch (const Error& e) {
    if (e.code() == Errc::validation) throw;
    throw Error(Errc::validation, e.detail());
  }
  if (data_dir.empty()) throw Error(Errc::validation, "data_dir must be set");
}

Json NodeConfig::to_json() const {
  Json j{{"api_addr", api_addr},
         {"bootstrap_addrs", bootstrap_addrs},
         {"data_dir", data_dir},
         {"door_server_url", door_server_url},
         {"k", k},
         {"key_bundle_path", key_bundle_path},
         {"listen_addr", listen_addr},
         {"server_public_key_path", server_public_key_path}};
  if (timer_period_s == std::floor(timer_period_s)) {
    j["timer_period_s"] = static_cast<std::int64_t>(timer_period_s);
  } else {
    j["timer_period_s"] = timer_period_s;
  }
  if (!private_key_path.empty()) j["private_key_path"] = private_key_path;
  if (!advertised_host.empty()) j["advertised_host"] = advertised_host;
  if (allow_remote_api) j["allow_remote_api"] = true;
  return j;
}

NodeConfig NodeConfig::from_json(const Json& j) {
  ObjectReader r(j, "node_config");
  NodeConfig c;
  if (r.has("listen_addr")) c.listen_addr = r.string("listen_addr");
  if (r.has("api_addr")) c.api_addr = r.string("api_addr");
  if (r.has("bootstrap_addrs")) {
    for (const auto& a : r.array("bootstrap_addrs")) {
      if (!a.is_string()) throw Error(Errc::parse, "bootstrap_addrs must hold strings");
      c.bootstrap_addrs.push_back(a.get<std::string>());
    }
  }
  if (r.has("door_server_url")) c.door_server_url = r.string("door_server_url");
  if (r.has("server_public_key_path")) c.server_public_key_path = r.string("server_public_key_path");
  if (r.has("key_bundle_path")) c.key_bundle_path = r.string("key_bundle_path");
  if (r.has("timer_period_s")) c.timer_period_s = r.number("timer_period_s");
  if (r.has("k")) {
    auto k = r.integer("k");
    if (k < 1) throw Error(Errc::validation, "k must be at least 1");
    c.k = static_cast<std::size_t>(k);
  }
  if (r.has("data_dir")) c.data_dir = r.string("data_dir");
  if (r.has("private_key_path")) c.private_key_path = r.string("private_key_path");
  if (r.has("advertised_host")) c.advertised_host = r.string("advertised_host");
  if (r.has("allow_remote_api")) c.allow_remote_api = r.boolean("allow_remote_api");
  r.finish();
  return c;
}

NodeConfig NodeConfig::load(const std::filesystem::path& path) {
  NodeConfig c = from_json(parse_json(read_file(path)));
  auto base = std::filesystem::absolute(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(c.data_dir);
  resolve(c.server_public_key_path);
  resolve(c.key_bundle_path);
  if (c.private_key_path.empty()) {
    c.private_key_path = (std::filesystem::path(c.data_dir) / "private_key.json").string();
  }
  resolve(c.private_key_path);
  c.validate();
  return c;
}

void NodeConfig::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump(2) + "\n");
}

}  // namespace marketpalace::node
