#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/node/config.hpp"

namespace httplib {
class Client;
}

namespace marketpalace::node {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDuplicate = 2;
inline constexpr int kExitNetwork = 3;

inline constexpr const char* kPassphraseEnv = "MARKETPALACE_PASSPHRASE";

/// MARKETPALACE_PASSPHRASE if set, otherwise an echo-free prompt on the
/// terminal. Throws Error(rejected_parameters) when neither is available.
std::string read_passphrase(const std::string& prompt, bool confirm);

struct KeygenOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> out;  // private key file; overrides the config
  int bits = 2048;
  bool force = false;
};

struct ListingOptions {
  std::string title;
  std::string description;
  std::int64_t price_amount = 0;
  std::string currency;
  std::optional<std::int64_t> ttl_s;
};

struct BidOptions {
  std::string content_id;
  std::int64_t amount = 0;
  std::string currency;
  std::optional<std::string> target_peer;
};

struct ChatOptions {
  std::optional<std::string> channel_id;
  std::optional<std::string> content_id;  // derive the channel with the listing owner
  std::string body;
};

struct SimulateOptions {
  std::vector<int> nodes{4};
  std::vector<double> periods{90.0};
  std::vector<int> ks{20};
  std::vector<std::string> topologies{"complete"};
  int trials = 100;
  std::uint64_t seed = 42;
  double link_delay_s = 0.0;
  std::optional<std::filesystem::path> out;
};

// Each command prints to `out`/`err` and returns a process exit code.
int cmd_keygen(const KeygenOptions& o, const std::string& passphrase, std::ostream& out, std::ostream& err);
int cmd_register(const std::filesystem::path& config_path, const std::string& passphrase,
                 const std::filesystem::path& attribute_file, std::ostream& out, std::ostream& err);
/// Runs until SIGINT or SIGTERM.
int cmd_serve(const std::filesystem::path& config_path, const std::string& passphrase, std::ostream& out,
              std::ostream& err);
int cmd_add_listing(const std::filesystem::path& config_path, const ListingOptions& o, std::ostream& out,
                    std::ostream& err);
int cmd_list(const std::filesystem::path& config_path, bool json, std::ostream& out, std::ostream& err);
int cmd_remove(const std::filesystem::path& config_path, const std::string& content_id, std::ostream& out,
               std::ostream& err);
int cmd_bid(const std::filesystem::path& config_path, const BidOptions& o, std::ostream& out, std::ostream& err);
int cmd_chat(const std::filesystem::path& config_path, const ChatOptions& o, std::ostream& out, std::ostream& err);
int cmd_status(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);

// Minimal client for a node's local API.
class ApiClient {
 public:
  explicit ApiClient(const std::string& api_addr);
  ~ApiClient();

  /// Throws Error(unreachable) on transport failure and the server's error
  /// code for non-2xx answers.
  Json get(const std::string& path);
  Json post(const std::string& path, const Json& body);
  Json del(const std::string& path);

 private:
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace marketpalace::node
