#pragma once

#include <memory>
#include <string>

#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/door/attribute.hpp"
#include "marketpalace/door/door_server.hpp"

namespace httplib {
class Client;
}

namespace marketpalace::door {

struct StartedSession {
  std::string token;
  std::string qr_payload;
};

// Client side of the door HTTP API. Transport failures raise
// Error(unreachable); server-reported failures keep their error code.
class DoorClient {
 public:
  /// `url` like "http://127.0.0.1:8080" or "https://door.example:443".
  explicit DoorClient(const std::string& url);
  ~DoorClient();

  StartedSession start_session();
  DisclosureResult disclose(const std::string& token, const AttributeDisclosure& d);
  crypto::CertifiedKey complete(const std::string& token, const crypto::PublicKey& key);
  crypto::PublicKey server_key();

 private:
  Json post(const std::string& path, const Json& body);
  Json get(const std::string& path);

  std::unique_ptr<httplib::Client> client_;
};

}  // namespace marketpalace::door
