#include "marketpalace/common/http_util.hpp"

#include <charconv>

#include <httplib.h>

namespace marketpalace::http {

std::pair<std::string, int> split_host_port(std::string_view addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(Errc::parse, "expected host:port, got '" + std::string(addr) + "'");
  }
  std::string_view port_text = addr.substr(colon + 1);
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(Errc::parse, "invalid port in '" + std::string(addr) + "'");
  }
  std::string host(addr.substr(0, colon));
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return {host, port};
}

int status_for(Errc code) noexcept {
  switch (code) {
    case Errc::not_found: return 404;
    case Errc::authorization:
    case Errc::bad_cert:
    case Errc::bad_signature: return 401;
    case Errc::session: return 409;
    case Errc::unreachable:
    case Errc::io: return 502;
    default: return 400;
  }
}

void reply_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view error, std::string_view detail) {
  reply_json(res, status, Json{{"detail", detail}, {"error", error}});
}

void reply_error(httplib::Response& res, const Error& e) {
  reply_error(res, status_for(e.code()), to_string(e.code()), e.detail());
}

Json decode_reply(const httplib::Result& res, std::string_view who) {
  if (!res) throw Error(Errc::unreachable, std::string(who) + ": " + httplib::to_string(res.error()));
  Json body;
  try {
    body = parse_json(res->body);
  } catch (const Error&) {
    throw Error(Errc::io, std::string(who) + " returned HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string error = body.is_object() ? body.value("error", "io") : "io";
    std::string detail = body.is_object() ? body.value("detail", "") : "";
    if (detail.empty()) detail = "HTTP " + std::to_string(res->status);
    throw Error(errc_from_string(error).value_or(Errc::io), detail);
  }
  return body;
}

void enable_cors(httplib::Server& server, std::function<bool(std::string_view origin)> allow) {
  auto allowed = [allow](const httplib::Request& req) -> std::optional<std::string> {
    if (!req.has_header("Origin")) return std::nullopt;
    std::string origin = req.get_header_value("Origin");
    if (!allow(origin)) return std::nullopt;
    return origin;
  };
  server.Options(".*", [allowed](const httplib::Request& req, httplib::Response& res) {
    res.status = allowed(req) ? 204 : 403;
  });
  server.set_post_routing_handler([allowed](const httplib::Request& req, httplib::Response& res) {
    auto origin = allowed(req);
    if (!origin) return;
    res.set_header("Access-Control-Allow-Origin", *origin);
    res.set_header("Vary", "Origin");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

void exclusive_bind(httplib::Server& server) {
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
}

bool is_loopback_origin(std::string_view origin) noexcept {
  for (std::string_view scheme : {"http://", "https://"}) {
    if (!origin.starts_with(scheme)) continue;
    std::string_view rest = origin.substr(scheme.size());
    for (std::string_view host : {"localhost", "127.0.0.1", "[::1]"}) {
      if (!rest.starts_with(host)) continue;
      std::string_view tail = rest.substr(host.size());
      if (tail.empty()) return true;
      if (tail.front() != ':' || tail.size() == 1) return false;
      return tail.find_first_not_of("0123456789", 1) == std::string_view::npos;
    }
  }
  return false;
}

}  // namespace marketpalace::http
