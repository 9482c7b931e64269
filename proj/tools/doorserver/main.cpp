#include <signal.h>

#include <iostream>

#include <CLI11.hpp>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/common/http_util.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/door/config.hpp"
#include "marketpalace/door/door_server.hpp"
#include "marketpalace/door/hash_store.hpp"
#include "marketpalace/door/http_service.hpp"

namespace mp = marketpalace;

namespace {

int init_key(const std::string& out, int bits, bool force) {
  if (!force && std::filesystem::exists(out)) {
    std::cerr << "error: " << out << " exists (use --force)\n";
    return 1;
  }
  auto keys = mp::crypto::generate_keypair(bits);
  mp::write_file_atomic(out, keys.private_key.to_pem());
  std::filesystem::permissions(out, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  std::cout << "server public key: " << keys.public_key.base64() << "\n";
  return 0;
}

int serve(const std::string& config_path) {
  auto config = mp::door::DoorConfig::load(config_path);
  auto key = mp::crypto::PrivateKey::from_pem(mp::read_file(config.server_key_path));
  auto verifier = std::make_shared<mp::door::TrustedIssuerVerifier>();
  for (const auto& issuer : config.issuer_keys) {
    verifier->trust(issuer.issuer_id, mp::crypto::PublicKey::from_base64(issuer.public_key));
  }
  mp::door::HashStore store(config.hash_store_path);
  mp::SystemClock clock;
  auto [host, port] = mp::http::split_host_port(config.listen_addr);
  mp::door::DoorOptions options;
  options.advertised_host = config.advertised_host.empty() ? config.listen_addr : config.advertised_host;
  options.session_ttl_s = config.session_ttl_s;
  mp::door::DoorServer door(key, verifier, store, clock, options);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  mp::door::DoorHttpService service(door, config.tls);
  int bound = service.start(host, port);
  std::cout << "door server on " << host << ":" << bound << " (" << store.size() << " registrations)"
            << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MarketPalace door server"};
  app.require_subcommand(1);

  std::string key_out = "server_key.pem";
  int bits = 2048;
  bool force = false;
  auto* c_init = app.add_subcommand("init-key", "Generate the server signing key");
  c_init->add_option("--out", key_out)->capture_default_str();
  c_init->add_option("--bits", bits)->capture_default_str();
  c_init->add_flag("--force", force);

  std::string config = "door.json";
  auto* c_serve = app.add_subcommand("serve", "Run the registration API");
  c_serve->add_option("--config", config)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (c_init->parsed()) return init_key(key_out, bits, force);
    if (c_serve->parsed()) return serve(config);
  } catch (const mp::Error& e) {
    std::cerr << "error: " << mp::to_string(e.code()) << ": " << e.detail() << "\n";
  }
  return 1;
}
