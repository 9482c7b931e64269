#include "marketpalace/door/client.hpp"

#include <httplib.h>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/http_util.hpp"

namespace marketpalace::door {
DoorClient::DoorClient(const std::string& url) : client_(std::make_unique<httplib::Client>(url)) {
  client_->set_connection_timeout(5, 0);
  client_->set_read_timeout(10, 0);
  client_->enable_server_certificate_verification(false);
}

DoorClient::~DoorClient() = default;

Json DoorClient::post(const std::string& path, const Json& body) {
  return http::decode_reply(client_->Post(path, canonical_dump(body), "application/json"), "door server");
}

Json DoorClient::get(const std::string& path) { return http::decode_reply(client_->Get(path), "door server"); }

StartedSession DoorClient::start_session() {
  Json j = post("/session", Json::object());
  ObjectReader r(j, "session_response");
  StartedSession s;
  s.qr_payload = r.string("qr_payload");
  s.token = r.string("token");
  r.finish();
  return s;
}

DisclosureResult DoorClient::disclose(const std::string& token, const AttributeDisclosure& d) {
  Json j = post("/session/" + token + "/disclose", d.to_json());
  ObjectReader r(j, "disclose_response");
  std::string result = r.string("result");
  r.finish();
  if (result == "accepted") return DisclosureResult::accepted;
  if (result == "duplicate") return DisclosureResult::duplicate;
  if (result == "invalid") return DisclosureResult::invalid;
  throw Error(Errc::parse, "unknown disclosure result '" + result + "'");
}

crypto::CertifiedKey DoorClient::complete(const std::string& token, const crypto::PublicKey& key) {
  Json j = post("/session/" + token + "/complete", Json{{"public_key", key.base64()}});
  return crypto::CertifiedKey::from_json(j);
}

crypto::PublicKey DoorClient::server_key() {
  Json j = get("/server-key");
  ObjectReader r(j, "server_key_response");
  auto key = crypto::PublicKey::from_base64(r.string("public_key"));
  r.finish();
  return key;
}

}  // namespace marketpalace::door
