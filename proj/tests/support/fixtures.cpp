#include "fixtures.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "marketpalace/common/files.hpp"
#include "marketpalace/crypto/hash.hpp"
#include "marketpalace/gossip/transport.hpp"

#ifndef MARKETPALACE_TEST_KEY_CACHE
#define MARKETPALACE_TEST_KEY_CACHE "/tmp/marketpalace-test-keys"
#endif

extern char** environ;

namespace mptest {

const mp::crypto::KeyPair& pooled_keys(int index) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<mp::crypto::KeyPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[index];
  if (slot) return *slot;
  std::filesystem::path dir = MARKETPALACE_TEST_KEY_CACHE;
  std::filesystem::create_directories(dir);
  auto file = dir / ("key_" + std::to_string(index) + ".pem");
  if (std::filesystem::exists(file)) {
    try {
      auto sk = mp::crypto::PrivateKey::from_pem(mp::read_file(file));
      auto pk = sk.public_key();
      slot = std::make_unique<mp::crypto::KeyPair>(mp::crypto::KeyPair{std::move(sk), std::move(pk)});
      return *slot;
    } catch (const std::exception&) {
      std::filesystem::remove(file);
    }
  }
  slot = std::make_unique<mp::crypto::KeyPair>(mp::crypto::generate_keypair(2048));
  mp::write_file_atomic(file, slot->private_key.to_pem());
  return *slot;
}

void warm_key_pool(int count) {
  std::filesystem::path dir = MARKETPALACE_TEST_KEY_CACHE;
  std::filesystem::create_directories(dir);
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  for (unsigned w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        auto file = dir / ("key_" + std::to_string(i) + ".pem");
        if (std::filesystem::exists(file)) continue;
        mp::write_file_atomic(file, mp::crypto::generate_keypair(2048).private_key.to_pem());
      }
    });
  }
  for (auto& t : workers) t.join();
}

mp::crypto::CertifiedKey certified(const mp::crypto::KeyPair& user) {
  return mp::crypto::certify_key(server_keys().private_key, user.public_key);
}

mp::gossip::Identity identity(int user) {
  const auto& k = user_keys(user);
  return mp::gossip::Identity{k.private_key, certified(k)};
}

mp::crypto::CertifiedKey self_signed(const mp::crypto::KeyPair& user) {
  return mp::crypto::certify_key(user.private_key, user.public_key);
}

mp::door::AttributeDisclosure disclosure(const std::string& value, const std::string& subject) {
  return mp::door::sign_disclosure(pooled_keys(kIssuerKey).private_key, "mock-issuer", "ssn", value, subject);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  auto base = std::filesystem::temp_directory_path();
  path_ = base / ("mp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                  mp::hex_encode(mp::crypto::random_bytes(4)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

DoorFixture::DoorFixture(const std::filesystem::path& dir, std::int64_t ttl_s) {
  auto verifier = std::make_shared<mp::door::TrustedIssuerVerifier>();
  verifier->trust("mock-issuer", pooled_keys(kIssuerKey).public_key);
  std::filesystem::create_directories(dir);
  store_ = std::make_unique<mp::door::HashStore>(dir / "hashes.txt");
  mp::door::DoorOptions options;
  options.session_ttl_s = ttl_s;
  door_ = std::make_unique<mp::door::DoorServer>(server_keys().private_key, verifier, *store_, clock_, options);
  http_ = std::make_unique<mp::door::DoorHttpService>(*door_);
  port_ = http_->start("127.0.0.1", 0);
}

DoorFixture::~DoorFixture() { stop(); }

void DoorFixture::stop() {
  if (http_) http_->stop();
}

int free_port() {
  mp::gossip::Listener l("127.0.0.1", 0);
  int port = l.port();
  l.close();
  return port;
}

namespace {

std::vector<std::string> merged_env(const std::map<std::string, std::string>& extra) {
  std::map<std::string, std::string> env;
  for (char** e = environ; *e != nullptr; ++e) {
    std::string kv = *e;
    auto eq = kv.find('=');
    if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (const auto& [k, v] : extra) env[k] = v;
  std::vector<std::string> out;
  for (const auto& [k, v] : env) out.push_back(k + "=" + v);
  return out;
}

int spawn(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env, int out_fd) {
  auto env_strings = merged_env(env);
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  std::vector<char*> envp;
  for (const auto& e : env_strings) envp.push_back(const_cast<char*>(e.c_str()));
  envp.push_back(nullptr);
  pid_t pid = ::fork();
  if (pid == 0) {
    sigset_t none;
    sigemptyset(&none);
    sigprocmask(SIG_SETMASK, &none, nullptr);
    int devnull = ::open("/dev/null", O_RDONLY);
    ::dup2(devnull, STDIN_FILENO);
    ::dup2(out_fd, STDOUT_FILENO);
    ::dup2(out_fd, STDERR_FILENO);
    ::execve(args[0], args.data(), envp.data());
    ::_exit(127);
  }
  return pid;
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return -WTERMSIG(status);
  return -1;
}

}  // namespace

Process::Process(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env,
                 const std::filesystem::path& log) {
  int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  pid_ = spawn(argv, env, fd);
  ::close(fd);
}

Process::~Process() {
  if (running()) {
    signal(SIGKILL);
    wait();
  }
}

void Process::signal(int sig) {
  if (pid_ > 0 && !status_) ::kill(pid_, sig);
}

int Process::wait() {
  if (!status_) {
    int st = 0;
    ::waitpid(pid_, &st, 0);
    status_ = decode_status(st);
  }
  return *status_;
}

bool Process::running() {
  if (status_) return false;
  int st = 0;
  if (::waitpid(pid_, &st, WNOHANG) == pid_) {
    status_ = decode_status(st);
    return false;
  }
  return true;
}

int run_process(const std::vector<std::string>& argv, const std::map<std::string, std::string>& env,
                std::string* output) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) return -1;
  pid_t pid = spawn(argv, env, fds[1]);
  ::close(fds[1]);
  std::string text;
  char buf[4096];
  ssize_t n;
  while ((n = ::read(fds[0], buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  ::close(fds[0]);
  int st = 0;
  ::waitpid(pid, &st, 0);
  if (output) *output = text;
  return decode_status(st);
}

}  // namespace mptest
