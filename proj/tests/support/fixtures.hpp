#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/door/attribute.hpp"
#include "marketpalace/door/door_server.hpp"
#include "marketpalace/door/hash_store.hpp"
#include "marketpalace/door/http_service.hpp"
#include "marketpalace/gossip/node.hpp"

namespace mptest {

namespace mp = marketpalace;

// Test keys come from a pool cached on disk across runs. Index 0 is the
// door server key, 1 a second server, 2 the mock issuer; user keys start at
// kFirstUserKey.
inline constexpr int kServerKey = 0;
inline constexpr int kOtherServerKey = 1;
inline constexpr int kIssuerKey = 2;
inline constexpr int kFirstUserKey = 3;

const mp::crypto::KeyPair& pooled_keys(int index);
/// Generates missing cache entries for indices [0, count) in parallel.
void warm_key_pool(int count);
inline const mp::crypto::KeyPair& server_keys() { return pooled_keys(kServerKey); }
inline const mp::crypto::KeyPair& user_keys(int i) { return pooled_keys(kFirstUserKey + i); }

mp::crypto::CertifiedKey certified(const mp::crypto::KeyPair& user);
mp::gossip::Identity identity(int user);
/// A certificate signed by the key itself rather than the server.
mp::crypto::CertifiedKey self_signed(const mp::crypto::KeyPair& user);

mp::door::AttributeDisclosure disclosure(const std::string& value, const std::string& subject = "holder");

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Door server with the mock issuer trusted, served over HTTP on loopback.
class DoorFixture {
 public:
  explicit DoorFixture(const std::filesystem::path& dir, std::int64_t ttl_s = 300);
  ~DoorFixture();

  mp::door::DoorServer& door() { return *door_; }
  mp::door::HashStore& store() { return *store_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int port() const noexcept { return port_; }
  void stop();

 private:
  mp::SystemClock clock_;
  std::unique_ptr<mp::door::HashStore> store_;
  std::unique_ptr<mp::door::DoorServer> door_;
  std::unique_ptr<mp::door::DoorHttpService> http_;
  int port_ = 0;
};

/// An unused loopback TCP port (bound then released).
int free_port();

// Child process with stdout and stderr sent to a log file.
class Process {
 public:
  Process(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env,
          const std::filesystem::path& log);
  ~Process();
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  int pid() const noexcept { return pid_; }
  void signal(int sig);
  /// Exit status, or -signal when killed by a signal.
  int wait();
  bool running();

 private:
  int pid_ = -1;
  std::optional<int> status_;
};

/// Runs to completion; returns the exit code and fills `output`.
int run_process(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env,
                std::string* output = nullptr);

}  // namespace mptest
