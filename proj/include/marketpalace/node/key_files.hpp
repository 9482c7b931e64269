#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/node/config.hpp"

namespace marketpalace::node {

/// {"public_key": base64 DER}, the same body GET /server-key returns.
void save_public_key(const std::filesystem::path& path, const crypto::PublicKey& key);
crypto::PublicKey load_public_key(const std::filesystem::path& path);

/// Writes the encrypted private key and its public half next to it
/// (<name>.pub.json). Throws Error(rejected_parameters) if either exists and
/// `force` is false.
void write_new_keys(const std::filesystem::path& private_key_path, const crypto::KeyPair& keys,
                    std::string_view passphrase, bool force);
std::filesystem::path public_key_path_for(const std::filesystem::path& private_key_path);

/// Decrypts the configured private key.
crypto::PrivateKey load_private_key(const NodeConfig& config, std::string_view passphrase);

/// The bundle if present, certified by `server_key` and matching `key`.
std::optional<crypto::KeyBundle> load_valid_bundle(const NodeConfig& config, const crypto::PublicKey& server_key,
                                                   const crypto::PublicKey& key);

}  // namespace marketpalace::node
