#include "marketpalace/node/key_files.hpp"

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/crypto/key_store.hpp"

namespace marketpalace::node {

void save_public_key(const std::filesystem::path& path, const crypto::PublicKey& key) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, canonical_dump(Json{{"public_key", key.base64()}}) + "\n");
}

crypto::PublicKey load_public_key(const std::filesystem::path& path) {
  Json body = parse_json(read_file(path));
  ObjectReader r(body, "public_key_file");
  auto key = crypto::PublicKey::from_base64(r.string("public_key"));
  if (r.has("modulus_bits")) (void)r.integer("modulus_bits");
  r.finish();
  return key;
}

std::filesystem::path public_key_path_for(const std::filesystem::path& private_key_path) {
  auto p = private_key_path;
  p.replace_extension(".pub.json");
  return p;
}

void write_new_keys(const std::filesystem::path& private_key_path, const crypto::KeyPair& keys,
                    std::string_view passphrase, bool force) {
  auto pub_path = public_key_path_for(private_key_path);
  if (!force && (std::filesystem::exists(private_key_path) || std::filesystem::exists(pub_path))) {
    throw Error(Errc::rejected_parameters,
                "key files already exist at " + private_key_path.string() + " (use --force to overwrite)");
  }
  auto enc = crypto::encrypt_private_key(keys.private_key, passphrase);
  if (private_key_path.has_parent_path()) std::filesystem::create_directories(private_key_path.parent_path());
  enc.save(private_key_path);
  write_file_atomic(pub_path, canonical_dump(Json{{"modulus_bits", keys.public_key.bits()},
                                                  {"public_key", keys.public_key.base64()}}) +
                                  "\n");
}

crypto::PrivateKey load_private_key(const NodeConfig& config, std::string_view passphrase) {
  std::filesystem::path path = config.private_key_path.empty()
                                   ? std::filesystem::path(config.data_dir) / "private_key.json"
                                   : std::filesystem::path(config.private_key_path);
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::not_found, "no private key at " + path.string() + "; run 'marketpalace keygen' first");
  }
  return crypto::decrypt_private_key(crypto::EncryptedPrivateKey::load(path), passphrase);
}

std::optional<crypto::KeyBundle> load_valid_bundle(const NodeConfig& config, const crypto::PublicKey& server_key,
                                                   const crypto::PublicKey& key) {
  if (!std::filesystem::exists(config.key_bundle_path)) return std::nullopt;
  auto bundle = crypto::KeyBundle::load(config.key_bundle_path);
  if (bundle.cert.public_key_der != key.der()) return std::nullopt;
  if (!crypto::verify_certification(server_key, bundle.cert)) return std::nullopt;
  return bundle;
}

}  // namespace marketpalace::node
