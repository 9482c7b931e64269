#include "marketpalace/gossip/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/http_util.hpp"

namespace marketpalace::gossip {
namespace {

using SteadyClock = std::chrono::steady_clock;

int remaining_ms(SteadyClock::time_point deadline) {
  auto left = std::chrono::duration_cast<Millis>(deadline - SteadyClock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

bool wait_for(int fd, short events, SteadyClock::time_point deadline) {
  for (;;) {
    pollfd p{fd, events, 0};
    int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) return false;
  }
}

sockaddr_in resolve(const std::string& host, int port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  std::string h = host == "localhost" ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, h.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(h.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error(Errc::unreachable, "cannot resolve " + host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

}  // namespace

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

void Socket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::write_all(ByteView data, Millis timeout) {
  auto deadline = SteadyClock::now() + timeout;
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n > 0) {
      off += static_cast<std::size_t>(n);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)) {
      if (!wait_for(fd_, POLLOUT, deadline)) throw Error(Errc::unreachable, "write timed out");
      continue;
    }
    throw Error(Errc::unreachable, std::string("write failed: ") + std::strerror(errno));
  }
}

bool Socket::read_exact(std::uint8_t* out, std::size_t n, Millis timeout, bool eof_ok) {
  auto deadline = SteadyClock::now() + timeout;
  std::size_t got = 0;
  while (got < n) {
    if (!wait_for(fd_, POLLIN, deadline)) throw Error(Errc::unreachable, "read timed out");
    ssize_t r = ::recv(fd_, out + got, n - got, MSG_DONTWAIT);
    if (r > 0) {
      got += static_cast<std::size_t>(r);
      continue;
    }
    if (r == 0) {
      if (got == 0 && eof_ok) return false;
      throw Error(Errc::unreachable, "connection closed mid-frame");
    }
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
    throw Error(Errc::unreachable, std::string("read failed: ") + std::strerror(errno));
  }
  return true;
}

std::optional<WireMessage> Socket::read_frame(Millis timeout) {
  std::uint8_t header[kFrameHeaderSize];
  if (!read_exact(header, sizeof header, timeout, true)) return std::nullopt;
  std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                      (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (len > kMaxFrameLength) throw Error(Errc::oversize, "frame length " + std::to_string(len));
  if (len == 0) throw Error(Errc::parse, "empty frame");
  Bytes frame(kFrameHeaderSize + len);
  std::copy(header, header + kFrameHeaderSize, frame.begin());
  read_exact(frame.data() + kFrameHeaderSize, len, timeout, false);
  return frame_decode(frame);
}

bool Socket::peer_closed() const noexcept {
  pollfd p{fd_, POLLIN, 0};
  if (::poll(&p, 1, 0) <= 0) return false;
  if (p.revents & (POLLERR | POLLHUP)) return true;
  char c;
  ssize_t r = ::recv(fd_, &c, 1, MSG_PEEK | MSG_DONTWAIT);
  return r == 0 || (r < 0 && errno != EAGAIN && errno != EWOULDBLOCK);
}

Socket connect_tcp(const std::string& host, int port, Millis timeout) {
  sockaddr_in addr = resolve(host, port);
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC | SOCK_NONBLOCK, 0));
  if (!s.valid()) throw Error(Errc::unreachable, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  int rc = ::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  if (rc != 0 && errno != EINPROGRESS) {
    throw Error(Errc::unreachable, host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (rc != 0) {
    if (!wait_for(s.fd(), POLLOUT, SteadyClock::now() + timeout)) {
      throw Error(Errc::unreachable, host + ":" + std::to_string(port) + ": connect timed out");
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      throw Error(Errc::unreachable, host + ":" + std::to_string(port) + ": " + std::strerror(err));
    }
  }
  return s;
}

Listener::Listener(const std::string& host, int port) {
  sockaddr_in addr{};
  try {
    addr = resolve(host, port);
  } catch (const Error& e) {
    throw Error(Errc::io, e.detail());
  }
  socket_ = Socket(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!socket_.valid()) throw Error(Errc::io, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw Error(Errc::io, "bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (::listen(socket_.fd(), 64) != 0) throw Error(Errc::io, std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Socket Listener::accept() {
  for (;;) {
    int fd = socket_.fd();
    if (fd < 0) return Socket{};
    int c = ::accept4(fd, nullptr, nullptr, SOCK_CLOEXEC);
    if (c >= 0) {
      int one = 1;
      ::setsockopt(c, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(c);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return Socket{};
  }
}

void Listener::close() noexcept {
  socket_.shutdown();
  socket_.close();
}

ConnectionPool::ConnectionPool(std::function<WireMessage()> hello, Timeouts timeouts)
    : hello_(std::move(hello)), timeouts_(timeouts) {}

std::shared_ptr<ConnectionPool::Connection> ConnectionPool::entry(const std::string& address) {
  std::lock_guard lock(mutex_);
  auto& slot = connections_[address];
  if (!slot) slot = std::make_shared<Connection>();
  return slot;
}

void ConnectionPool::ensure_connected(Connection& c, const std::string& address) {
  if (c.socket.valid() && !c.socket.peer_closed()) return;
  c.socket.close();
  c.hello_ack.reset();
  auto [host, port] = http::split_host_port(address);
  Socket s = connect_tcp(host, port, timeouts_.connect);
  s.write_frame(hello_(), timeouts_.io);
  auto ack = s.read_frame(timeouts_.io);
  if (!ack || ack->type != MessageType::hello_ack) {
    throw Error(Errc::unreachable, address + " refused the handshake");
  }
  c.socket = std::move(s);
  c.hello_ack = std::move(ack);
}

WireMessage ConnectionPool::handshake(const std::string& address) {
  auto c = entry(address);
  std::lock_guard lock(c->mutex);
  ensure_connected(*c, address);
  return *c->hello_ack;
}

std::optional<WireMessage> ConnectionPool::request(const std::string& address, const WireMessage& msg,
                                                   bool expect_reply) {
  auto c = entry(address);
  std::lock_guard lock(c->mutex);
  for (int attempt = 0;; ++attempt) {
    bool reused = c->socket.valid();
    try {
      ensure_connected(*c, address);
      c->socket.write_frame(msg, timeouts_.io);
      if (!expect_reply) return std::nullopt;
      auto reply = c->socket.read_frame(timeouts_.io);
      if (!reply) throw Error(Errc::unreachable, address + " closed the connection");
      return reply;
    } catch (const Error& e) {
      c->socket.close();
      c->hello_ack.reset();
      if (!reused || attempt > 0 || e.code() == Errc::oversize) {
        if (e.code() == Errc::unreachable) throw;
        throw Error(Errc::unreachable, address + ": " + e.detail());
      }
    }
  }
}

void ConnectionPool::drop(const std::string& address) {
  std::shared_ptr<Connection> c;
  {
    std::lock_guard lock(mutex_);
    auto it = connections_.find(address);
    if (it == connections_.end()) return;
    c = it->second;
    connections_.erase(it);
  }
  std::lock_guard lock(c->mutex);
  c->socket.close();
}

void ConnectionPool::close_all() {
  std::map<std::string, std::shared_ptr<Connection>> all;
  {
    std::lock_guard lock(mutex_);
    all.swap(connections_);
  }
  for (auto& [addr, c] : all) {
    c->socket.shutdown();
    std::lock_guard lock(c->mutex);
    c->socket.close();
  }
}

}  // namespace marketpalace::gossip
