#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "marketpalace/gossip/wire.hpp"

namespace marketpalace::gossip {

using Millis = std::chrono::milliseconds;

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) noexcept : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  void close() noexcept;
  /// Wakes up any thread blocked reading this socket.
  void shutdown() noexcept;

  /// Throws Error(unreachable) on error or timeout.
  void write_all(ByteView data, Millis timeout);
  /// nullopt on orderly EOF before any byte; throws Error(unreachable) on
  /// error, timeout, or EOF mid-frame.
  std::optional<WireMessage> read_frame(Millis timeout);
  void write_frame(const WireMessage& msg, Millis timeout) { write_all(frame_encode(msg), timeout); }
  /// True if the peer has closed or reset the connection.
  bool peer_closed() const noexcept;

 private:
  bool read_exact(std::uint8_t* out, std::size_t n, Millis timeout, bool eof_ok);

  int fd_ = -1;
};

/// Throws Error(unreachable) if no connection is established within `timeout`.
Socket connect_tcp(const std::string& host, int port, Millis timeout);

class Listener {
 public:
  /// Port 0 binds an ephemeral port. Throws Error(io) on failure.
  Listener(const std::string& host, int port);
  int port() const noexcept { return port_; }
  /// Blocks; returns an invalid socket once close() was called.
  Socket accept();
  void close() noexcept;

 private:
  Socket socket_;
  int port_ = 0;
};

// Persistent outbound connections keyed by address. A new connection
// starts with the hello produced by `hello`; the hello-ack is kept so the
// caller can learn who answered.
class ConnectionPool {
 public:
  struct Timeouts {
    Millis connect{5000};
    Millis io{10000};
  };

  ConnectionPool(std::function<WireMessage()> hello, Timeouts timeouts);

  /// Sends `msg` and, if `expect_reply`, returns the reply frame. Retries
  /// once over a fresh connection when a pooled one turned out stale.
  /// Throws Error(unreachable).
  std::optional<WireMessage> request(const std::string& address, const WireMessage& msg,
                                     bool expect_reply);
  /// Opens (or reuses) a connection; returns the peer's hello-ack.
  WireMessage handshake(const std::string& address);
  void drop(const std::string& address);
  void close_all();

 private:
  struct Connection {
    std::mutex mutex;
    Socket socket;
    std::optional<WireMessage> hello_ack;
  };

  std::shared_ptr<Connection> entry(const std::string& address);
  void ensure_connected(Connection& c, const std::string& address);

  std::function<WireMessage()> hello_;
  Timeouts timeouts_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Connection>> connections_;
};

}  // namespace marketpalace::gossip
