#include "marketpalace/door/http_service.hpp"

#include <httplib.h>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/http_util.hpp"
#include "marketpalace/common/log.hpp"

namespace marketpalace::door {

DoorHttpService::DoorHttpService(DoorServer& door, const TlsConfig& tls) : door_(door) {
  if (tls.enabled) {
    auto ssl = std::make_unique<httplib::SSLServer>(tls.cert_path.c_str(), tls.key_path.c_str());
    if (!ssl->is_valid()) throw Error(Errc::io, "cannot load TLS certificate or key");
    server_ = std::move(ssl);
  } else {
    server_ = std::make_unique<httplib::Server>();
  }
  http::exclusive_bind(*server_);
  install_routes();
}

DoorHttpService::~DoorHttpService() { stop(); }

void DoorHttpService::install_routes() {
  using httplib::Request;
  using httplib::Response;

  http::enable_cors(*server_, [](std::string_view) { return true; });

  server_->Post("/session", [this](const Request&, Response& res) {
    door_.expire_sessions(std::time(nullptr));
    auto start = door_.start_session();
    http::reply_json(res, 200, Json{{"qr_payload", start.qr_payload}, {"token", start.token.token}});
  });

  server_->Post(R"(/session/([0-9a-f]+)/disclose)", [this](const Request& req, Response& res) {
    try {
      auto d = AttributeDisclosure::from_json(parse_json(req.body));
      auto result = door_.disclose(req.matches[1].str(), d);
      http::reply_json(res, 200, Json{{"result", to_string(result)}});
    } catch (const Error& e) {
      http::reply_error(res, e);
    }
  });

  server_->Post(R"(/session/([0-9a-f]+)/complete)", [this](const Request& req, Response& res) {
    try {
      Json body = parse_json(req.body);
      ObjectReader r(body, "complete_request");
      std::string key_b64 = r.string("public_key");
      r.finish();
      Bytes der;
      try {
        der = base64_decode(key_b64);
      } catch (const Error&) {
        throw Error(Errc::encoding, "public_key is not base64");
      }
      auto cert = door_.complete_registration(req.matches[1].str(), der);
      http::reply_json(res, 200, cert.to_json());
    } catch (const Error& e) {
      http::reply_error(res, e);
    }
  });

  server_->Get("/server-key", [this](const Request&, Response& res) {
    http::reply_json(res, 200, Json{{"public_key", door_.server_public_key().base64()}});
  });

  server_->set_exception_handler([](const Request&, Response& res, std::exception_ptr) {
    http::reply_error(res, 500, "internal", "unexpected server error");
  });
}

int DoorHttpService::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw Error(Errc::io, "cannot bind door server to " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  log::info("door", "listening on " + host + ":" + std::to_string(port_));
  return port_;
}

void DoorHttpService::run(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw Error(Errc::io, "cannot bind door server to " + host + ":" + std::to_string(port));
  }
  port_ = port;
  log::info("door", "listening on " + host + ":" + std::to_string(port_));
  server_->listen_after_bind();
}

void DoorHttpService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace marketpalace::door
