#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "marketpalace/common/error.hpp"
#include "marketpalace/node/commands.hpp"

namespace mp = marketpalace;
using namespace marketpalace::node;

namespace {

template <class T>
std::vector<T> split_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if constexpr (std::is_same_v<T, std::string>) {
      out.push_back(item);
    } else {
      std::size_t used = 0;
      T v{};
      if constexpr (std::is_same_v<T, int>) {
        v = std::stoi(item, &used);
      } else {
        v = std::stod(item, &used);
      }
      if (used != item.size()) throw CLI::ValidationError("bad list item '" + item + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw CLI::ValidationError("empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MarketPalace market node"};
  app.require_subcommand(1);
  std::string config = "marketpalace.json";
  app.add_option("--config", config, "Node config file")->capture_default_str();

  KeygenOptions keygen;
  std::string keygen_out;
  auto* c_keygen = app.add_subcommand("keygen", "Create an RSA key pair protected by a passphrase");
  c_keygen->add_option("--out", keygen_out, "Private key file (default: from config)");
  c_keygen->add_option("--bits", keygen.bits, "Modulus size")->capture_default_str();
  c_keygen->add_flag("--force", keygen.force, "Overwrite existing key files");

  std::string attribute_file;
  auto* c_register = app.add_subcommand("register", "Register this node's key with the door server");
  c_register->add_option("--attribute", attribute_file, "Issuer-signed attribute disclosure (JSON)")->required();

  auto* c_serve = app.add_subcommand("serve", "Run the node daemon");

  ListingOptions listing;
  std::int64_t ttl = 0;
  auto* c_add = app.add_subcommand("add-listing", "Publish a listing");
  c_add->add_option("--title", listing.title)->required();
  c_add->add_option("--description", listing.description);
  c_add->add_option("--price", listing.price_amount, "Price in minor units")->required();
  c_add->add_option("--currency", listing.currency, "ISO 4217 code")->required();
  auto* ttl_opt = c_add->add_option("--ttl", ttl, "Lifetime in seconds");

  bool list_json = false;
  auto* c_list = app.add_subcommand("list", "Show listings known to the node");
  c_list->add_flag("--json", list_json);

  std::string remove_id;
  auto* c_remove = app.add_subcommand("remove", "Remove one of your listings");
  c_remove->add_option("content_id", remove_id)->required();

  BidOptions bid;
  std::string bid_target;
  auto* c_bid = app.add_subcommand("bid", "Send a bid to a listing's owner");
  c_bid->add_option("--listing", bid.content_id)->required();
  c_bid->add_option("--amount", bid.amount, "Amount in minor units")->required();
  c_bid->add_option("--currency", bid.currency)->required();
  auto* target_opt = c_bid->add_option("--to", bid_target, "Peer id (default: listing owner)");

  ChatOptions chat;
  std::string chat_channel;
  std::string chat_listing;
  auto* c_chat = app.add_subcommand("chat", "Send a chat message, or show a channel without --body");
  auto* chan_opt = c_chat->add_option("--channel", chat_channel);
  auto* chat_listing_opt = c_chat->add_option("--listing", chat_listing, "Chat with this listing's owner");
  c_chat->add_option("--body", chat.body);

  SimulateOptions sim;
  std::string nodes = "4", periods = "90", ks = "20", topologies = "complete", sim_out;
  auto* c_sim = app.add_subcommand("simulate", "Run the propagation simulator (comma lists sweep)");
  c_sim->add_option("--nodes", nodes)->capture_default_str();
  c_sim->add_option("--period", periods)->capture_default_str();
  c_sim->add_option("--k", ks)->capture_default_str();
  c_sim->add_option("--topology", topologies, "complete, ring or random(<degree>)")->capture_default_str();
  c_sim->add_option("--trials", sim.trials)->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--link-delay", sim.link_delay_s)->capture_default_str();
  c_sim->add_option("--out", sim_out, "CSV output file; raw delays go next to it");

  auto* c_status = app.add_subcommand("status", "Show the running node's status");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_keygen->parsed()) {
      if (!keygen_out.empty()) keygen.out = keygen_out;
      else keygen.config_path = config;
      std::string pass = read_passphrase("New passphrase: ", true);
      return cmd_keygen(keygen, pass, std::cout, std::cerr);
    }
    if (c_register->parsed()) {
      return cmd_register(config, read_passphrase("Passphrase: ", false), attribute_file, std::cout, std::cerr);
    }
    if (c_serve->parsed()) return cmd_serve(config, read_passphrase("Passphrase: ", false), std::cout, std::cerr);
    if (c_add->parsed()) {
      if (*ttl_opt) listing.ttl_s = ttl;
      return cmd_add_listing(config, listing, std::cout, std::cerr);
    }
    if (c_list->parsed()) return cmd_list(config, list_json, std::cout, std::cerr);
    if (c_remove->parsed()) return cmd_remove(config, remove_id, std::cout, std::cerr);
    if (c_bid->parsed()) {
      if (*target_opt) bid.target_peer = bid_target;
      return cmd_bid(config, bid, std::cout, std::cerr);
    }
    if (c_chat->parsed()) {
      if (*chan_opt) chat.channel_id = chat_channel;
      if (*chat_listing_opt) chat.content_id = chat_listing;
      return cmd_chat(config, chat, std::cout, std::cerr);
    }
    if (c_sim->parsed()) {
      sim.nodes = split_list<int>(nodes);
      sim.periods = split_list<double>(periods);
      sim.ks = split_list<int>(ks);
      sim.topologies = split_list<std::string>(topologies);
      if (!sim_out.empty()) sim.out = sim_out;
      return cmd_simulate(sim, std::cout, std::cerr);
    }
    if (c_status->parsed()) return cmd_status(config, std::cout, std::cerr);
  } catch (const mp::Error& e) {
    std::cerr << "error: " << mp::to_string(e.code()) << ": " << e.detail() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
