#include "marketpalace/door/config.hpp"

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"

namespace marketpalace::door {

Json DoorConfig::to_json() const {
  Json issuers = Json::array();
  for (const auto& k : issuer_keys) {
    issuers.push_back(Json{{"issuer_id", k.issuer_id}, {"public_key", k.public_key}});
  }
  Json j{{"issuer_keys", issuers},
         {"listen_addr", listen_addr},
         {"server_key_path", server_key_path},
         {"session_ttl_s", session_ttl_s},
         {"tls", Json{{"cert_path", tls.cert_path}, {"enabled", tls.enabled}, {"key_path", tls.key_path}}}};
  if (!hash_store_path.empty()) j["hash_store_path"] = hash_store_path;
  if (!advertised_host.empty()) j["advertised_host"] = advertised_host;
  return j;
}

DoorConfig DoorConfig::from_json(const Json& j) {
  ObjectReader r(j, "door_config");
  DoorConfig c;
  c.listen_addr = r.string("listen_addr");
  c.server_key_path = r.string("server_key_path");
  for (const auto& item : r.array("issuer_keys")) {
    ObjectReader ir(item, "issuer_key");
    IssuerKey k{ir.string("issuer_id"), ir.string("public_key")};
    ir.finish();
    c.issuer_keys.push_back(std::move(k));
  }
  if (r.has("session_ttl_s")) c.session_ttl_s = r.integer("session_ttl_s");
  if (c.session_ttl_s <= 0) throw Error(Errc::validation, "session_ttl_s must be positive");
  if (r.has("tls")) {
    ObjectReader tr(r.object("tls"), "tls");
    c.tls.enabled = tr.boolean("enabled");
    if (tr.has("cert_path")) c.tls.cert_path = tr.string("cert_path");
    if (tr.has("key_path")) c.tls.key_path = tr.string("key_path");
    tr.finish();
  }
  if (r.has("hash_store_path")) c.hash_store_path = r.string("hash_store_path");
  if (r.has("advertised_host")) c.advertised_host = r.string("advertised_host");
  r.finish();
  return c;
}

DoorConfig DoorConfig::load(const std::filesystem::path& path) {
  auto c = from_json(parse_json(read_file(path)));
  // Relative paths resolve against the config file's directory.
  auto base = path.parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
  };
  resolve(c.server_key_path);
  resolve(c.hash_store_path);
  resolve(c.tls.cert_path);
  resolve(c.tls.key_path);
  if (c.hash_store_path.empty()) {
    c.hash_store_path = (std::filesystem::path(c.server_key_path).parent_path() / "hashes.txt").string();
  }
  return c;
}

}  // namespace marketpalace::door
