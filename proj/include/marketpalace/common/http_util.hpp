#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/common/error.hpp"

namespace httplib {
class Server;
struct Response;
class Result;
}

namespace marketpalace::http {

/// Splits "host:port"; throws Error(parse) on a missing or invalid port.
std::pair<std::string, int> split_host_port(std::string_view addr);

/// HTTP status used for each library error code.
int status_for(Errc code) noexcept;

void reply_json(httplib::Response& res, int status, const Json& body);
void reply_error(httplib::Response& res, int status, std::string_view error, std::string_view detail);
void reply_error(httplib::Response& res, const Error& e);

/// Lets browsers on other origins call `server`: origins accepted by
/// `allow` are echoed in Access-Control-Allow-Origin and preflights answered.
void enable_cors(httplib::Server& server, std::function<bool(std::string_view origin)> allow);
/// Binding fails when another process already listens on the port.
void exclusive_bind(httplib::Server& server);
/// http(s)://localhost, 127.0.0.1 or [::1], any port.
bool is_loopback_origin(std::string_view origin) noexcept;

/// Body of a 2xx reply. Transport failures become Error(unreachable); an
/// error body {error, detail} is rethrown with its original code.
Json decode_reply(const httplib::Result& res, std::string_view who);

}  // namespace marketpalace::http
