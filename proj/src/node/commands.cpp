#include "marketpalace/node/commands.hpp"

#include <signal.h>
#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/common/http_util.hpp"
#include "marketpalace/common/log.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/market/messages.hpp"
#include "marketpalace/node/daemon.hpp"
#include "marketpalace/node/key_files.hpp"
#include "marketpalace/node/registration.hpp"
#include "marketpalace/sim/sweep.hpp"

namespace marketpalace::node {
namespace {

int report(const Error& e, std::ostream& err) {
  err << "error: " << to_string(e.code()) << ": " << e.detail() << "\n";
  return e.code() == Errc::unreachable ? kExitNetwork : kExitError;
}

template <class F>
int run_guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return report(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

std::string prompt_hidden(const std::string& prompt) {
  if (!::isatty(STDIN_FILENO)) {
    throw Error(Errc::rejected_parameters,
                std::string("no passphrase: set ") + kPassphraseEnv + " or run from a terminal");
  }
  std::cerr << prompt << std::flush;
  termios old{};
  ::tcgetattr(STDIN_FILENO, &old);
  termios quiet = old;
  quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
  ::tcsetattr(STDIN_FILENO, TCSANOW, &quiet);
  std::string line;
  std::getline(std::cin, line);
  ::tcsetattr(STDIN_FILENO, TCSANOW, &old);
  std::cerr << "\n";
  return line;
}

ApiClient api_for(const std::filesystem::path& config_path) {
  return ApiClient(NodeConfig::load(config_path).api_addr);
}

}  // namespace

std::string read_passphrase(const std::string& prompt, bool confirm) {
  if (const char* env = std::getenv(kPassphraseEnv)) return env;
  std::string first = prompt_hidden(prompt);
  if (confirm && prompt_hidden("Repeat passphrase: ") != first) {
    throw Error(Errc::rejected_parameters, "passphrases do not match");
  }
  return first;
}

ApiClient::ApiClient(const std::string& api_addr) {
  auto [host, port] = http::split_host_port(api_addr);
  client_ = std::make_unique<httplib::Client>(host, port);
  client_->set_connection_timeout(5, 0);
  client_->set_read_timeout(15, 0);
}

ApiClient::~ApiClient() = default;

Json ApiClient::get(const std::string& path) { return http::decode_reply(client_->Get(path), "node API"); }

Json ApiClient::post(const std::string& path, const Json& body) {
  return http::decode_reply(client_->Post(path, canonical_dump(body), "application/json"), "node API");
}

Json ApiClient::del(const std::string& path) { return http::decode_reply(client_->Delete(path), "node API"); }

int cmd_keygen(const KeygenOptions& o, const std::string& passphrase, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    std::filesystem::path target;
    if (o.out) {
      target = *o.out;
    } else if (o.config_path) {
      target = NodeConfig::load(*o.config_path).private_key_path;
    } else {
      throw Error(Errc::rejected_parameters, "give --out or --config");
    }
    auto pub_path = public_key_path_for(target);
    if (!o.force && (std::filesystem::exists(target) || std::filesystem::exists(pub_path))) {
      throw Error(Errc::rejected_parameters,
                  "key files already exist at " + target.string() + " (use --force to overwrite)");
    }
    auto keys = crypto::generate_keypair(o.bits);
    write_new_keys(target, keys, passphrase, o.force);
    out << "private key: " << target.string() << "\n"
        << "public key:  " << pub_path.string() << "\n"
        << "fingerprint: " << hex_encode(keys.public_key.fingerprint()) << "\n";
    return kExitOk;
  });
}

int cmd_register(const std::filesystem::path& config_path, const std::string& passphrase,
                 const std::filesystem::path& attribute_file, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    auto config = NodeConfig::load(config_path);
    auto key = load_private_key(config, passphrase);
    auto disclosure = door::AttributeDisclosure::from_json(parse_json(read_file(attribute_file)));
    SystemClock clock;
    auto result = register_with_door(config, key, disclosure, clock);
    switch (result.status) {
      case RegistrationStatus::duplicate_identity:
        err << "error: already registered: this identity has been used for a registration before\n";
        return kExitDuplicate;
      case RegistrationStatus::already_registered:
        out << "already registered; bundle at " << config.key_bundle_path << "\n";
        break;
      case RegistrationStatus::registered:
        out << "registered; bundle saved to " << config.key_bundle_path << "\n";
        break;
    }
    out << "peer id: " << hex_encode(result.bundle->cert.fingerprint()) << "\n";
    return kExitOk;
  });
}

int cmd_serve(const std::filesystem::path& config_path, const std::string& passphrase, std::ostream& out,
              std::ostream& err) {
  return run_guarded(err, [&] {
    auto config = NodeConfig::load(config_path);
    if (!std::filesystem::exists(config.server_public_key_path) ||
        !std::filesystem::exists(config.key_bundle_path)) {
      throw Error(Errc::authorization,
                  "this node is not registered; run 'marketpalace keygen' and 'marketpalace register' first");
    }
    auto server_key = load_public_key(config.server_public_key_path);
    auto key = load_private_key(config, passphrase);
    auto bundle = load_valid_bundle(config, server_key, key.public_key());
    if (!bundle) {
      throw Error(Errc::authorization, "the key bundle at " + config.key_bundle_path +
                                           " does not certify this private key; run 'marketpalace register'");
    }

    // Block the shutdown signals before any thread starts so only sigwait sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    SystemClock clock;
    Daemon daemon(config, std::move(key), bundle, server_key, clock);
    daemon.start();
    out << "serving: p2p " << daemon.p2p_address() << ", api port " << daemon.api_port() << ", peer id "
        << hex_encode(daemon.node().id()) << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    log::info("daemon", "shutting down");
    daemon.stop();
    return kExitOk;
  });
}

int cmd_add_listing(const std::filesystem::path& config_path, const ListingOptions& o, std::ostream& out,
                    std::ostream& err) {
  return run_guarded(err, [&] {
    Json body{{"currency", o.currency},
              {"description", o.description},
              {"price_amount", o.price_amount},
              {"title", o.title}};
    if (o.ttl_s) body["ttl_s"] = *o.ttl_s;
    Json sl = api_for(config_path).post("/listings", body);
    out << sl.at("content_id").get<std::string>() << "\n";
    return kExitOk;
  });
}

int cmd_list(const std::filesystem::path& config_path, bool json, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    Json listings = api_for(config_path).get("/listings");
    if (json) {
      out << listings.dump(2) << "\n";
      return kExitOk;
    }
    for (const auto& sl : listings) {
      const auto& l = sl.at("listing");
      out << sl.at("content_id").get<std::string>() << "  " << l.at("price_amount").get<std::int64_t>() << " "
          << l.at("currency").get<std::string>() << "  " << l.at("title").get<std::string>() << "\n";
    }
    return kExitOk;
  });
}

int cmd_remove(const std::filesystem::path& config_path, const std::string& content_id, std::ostream& out,
               std::ostream& err) {
  return run_guarded(err, [&] {
    api_for(config_path).del("/listings/" + content_id);
    out << "removed " << content_id << "\n";
    return kExitOk;
  });
}

int cmd_bid(const std::filesystem::path& config_path, const BidOptions& o, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    Json body{{"amount", o.amount}, {"content_id", o.content_id}, {"currency", o.currency}};
    if (o.target_peer) body["target_peer"] = *o.target_peer;
    Json reply = api_for(config_path).post("/bids", body);
    out << "bid sent; channel " << reply.at("channel_id").get<std::string>() << "\n";
    return kExitOk;
  });
}

int cmd_chat(const std::filesystem::path& config_path, const ChatOptions& o, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    ApiClient api = api_for(config_path);
    std::string channel;
    if (o.channel_id) {
      channel = *o.channel_id;
    } else if (o.content_id) {
      Digest self = digest_from_hex(api.get("/status").at("peer_id").get<std::string>());
      std::optional<Digest> owner;
      for (const auto& sl : api.get("/listings")) {
        if (sl.at("content_id") == *o.content_id) {
          owner = digest_from_hex(sl.at("listing").at("owner_fingerprint").get<std::string>());
        }
      }
      if (!owner) throw Error(Errc::not_found, "listing " + *o.content_id + " is not known to this node");
      channel = hex_encode(market::chat_channel_id(self, *owner, market::ContentId::from_hex(*o.content_id)));
    } else {
      throw Error(Errc::rejected_parameters, "give --channel or --listing");
    }
    if (o.body.empty()) {
      out << api.get("/chats/" + channel).dump(2) << "\n";
    } else {
      api.post("/chats/" + channel, Json{{"body", o.body}});
      out << "sent on channel " << channel << "\n";
    }
    return kExitOk;
  });
}

int cmd_status(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    out << api_for(config_path).get("/status").dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    std::vector<sim::SimConfig> configs;
    for (int n : o.nodes)
      for (double p : o.periods)
        for (int k : o.ks)
          for (const auto& t : o.topologies) {
            sim::SimConfig c;
            c.num_nodes = n;
            c.timer_period_s = p;
            c.k = k;
            c.topology = sim::Topology::parse(t);
            c.trials = o.trials;
            c.seed = o.seed;
            c.link_delay_s = o.link_delay_s;
            configs.push_back(c);
          }
    auto rows = sim::sweep(configs);
    out << sim::to_csv(rows);
    if (o.out) {
      auto raw = sim::write_sweep(rows, *o.out);
      err << "wrote " << o.out->string();
      for (const auto& r : raw) err << ", " << r.string();
      err << "\n";
    }
    for (const auto& r : rows) {
      if (!r.error.empty()) return kExitError;
    }
    return kExitOk;
  });
}

}  // namespace marketpalace::node
