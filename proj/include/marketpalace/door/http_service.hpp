#pragma once

#include <memory>
#include <string>
#include <thread>

#include "marketpalace/door/config.hpp"
#include "marketpalace/door/door_server.hpp"

namespace httplib {
class Server;
}

namespace marketpalace::door {

// HTTP front of the door server:
//   POST /session                   -> {qr_payload, token}
//   POST /session/{token}/disclose  AttributeDisclosure -> {result}
//   POST /session/{token}/complete  {public_key} -> CertifiedKey
//   GET  /server-key                -> {public_key}
class DoorHttpService {
 public:
  explicit DoorHttpService(DoorServer& door, const TlsConfig& tls = {});
  ~DoorHttpService();
  DoorHttpService(const DoorHttpService&) = delete;
  DoorHttpService& operator=(const DoorHttpService&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();
  int port() const noexcept { return port_; }

 private:
  void install_routes();

  DoorServer& door_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace marketpalace::door
