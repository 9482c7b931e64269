#include "marketpalace/node/registration.hpp"

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/common/log.hpp"
#include "marketpalace/door/client.hpp"
#include "marketpalace/node/key_files.hpp"

namespace marketpalace::node {
namespace {

struct Pending {
  std::string token;
  bool disclosed = false;
};

std::filesystem::path pending_path(const NodeConfig& config) {
  return std::filesystem::path(config.data_dir) / "registration_pending.json";
}

std::optional<Pending> load_pending(const NodeConfig& config) {
  auto path = pending_path(config);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    Json body = parse_json(read_file(path));
    ObjectReader r(body, "pending_registration");
    Pending p{r.string("token"), r.boolean("disclosed")};
    r.finish();
    return p;
  } catch (const Error&) {
    std::filesystem::remove(path);
    return std::nullopt;
  }
}

void save_pending(const NodeConfig& config, const Pending& p) {
  std::filesystem::create_directories(config.data_dir);
  write_file_atomic(pending_path(config), canonical_dump(Json{{"disclosed", p.disclosed}, {"token", p.token}}));
}

void clear_pending(const NodeConfig& config) { std::filesystem::remove(pending_path(config)); }

}  // namespace

RegistrationResult register_with_door(const NodeConfig& config, const crypto::PrivateKey& key,
                                      const door::AttributeDisclosure& disclosure, const Clock& clock) {
  crypto::PublicKey pub = key.public_key();

  if (std::filesystem::exists(config.server_public_key_path)) {
    auto known = load_public_key(config.server_public_key_path);
    if (auto bundle = load_valid_bundle(config, known, pub)) {
      return {RegistrationStatus::already_registered, bundle};
    }
  }

  door::DoorClient client(config.door_server_url);
  crypto::PublicKey server_key = client.server_key();
  if (std::filesystem::exists(config.server_public_key_path) &&
      !(load_public_key(config.server_public_key_path) == server_key)) {
    throw Error(Errc::bad_cert, "door server key differs from " + config.server_public_key_path);
  }

  auto pending = load_pending(config);
  for (int round = 0; round < 2; ++round) {
    if (!pending) {
      auto started = client.start_session();
      pending = Pending{started.token, false};
      save_pending(config, *pending);
    }
    if (!pending->disclosed) {
      door::DisclosureResult result;
      try {
        result = client.disclose(pending->token, disclosure);
      } catch (const Error& e) {
        if (e.code() != Errc::session) throw;
        log::info("register", "stored session is gone, starting a new one");
        clear_pending(config);
        pending.reset();
        continue;
      }
      if (result == door::DisclosureResult::duplicate) {
        clear_pending(config);
        return {RegistrationStatus::duplicate_identity, std::nullopt};
      }
      if (result == door::DisclosureResult::invalid) {
        clear_pending(config);
        throw Error(Errc::validation, "the door server rejected the attribute assertion");
      }
      pending->disclosed = true;
      save_pending(config, *pending);
    }
    crypto::CertifiedKey cert;
    try {
      cert = client.complete(pending->token, pub);
    } catch (const Error& e) {
      if (e.code() == Errc::session) clear_pending(config);
      throw;
    }
    if (cert.public_key_der != pub.der() || !crypto::verify_certification(server_key, cert)) {
      throw Error(Errc::bad_cert, "door server returned a certificate that does not verify");
    }
    crypto::KeyBundle bundle{cert, clock.now()};
    if (std::filesystem::path(config.key_bundle_path).has_parent_path()) {
      std::filesystem::create_directories(std::filesystem::path(config.key_bundle_path).parent_path());
    }
    bundle.save(config.key_bundle_path);
    save_public_key(config.server_public_key_path, server_key);
    clear_pending(config);
    return {RegistrationStatus::registered, bundle};
  }
  throw Error(Errc::session, "could not obtain a usable registration session");
}

}  // namespace marketpalace::node
