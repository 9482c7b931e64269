// Stand-in for a real attribute issuer: holds a key and signs attribute
// disclosures that the door server's trusted-issuer verifier accepts.
#include <iostream>

#include <CLI11.hpp>

#include "marketpalace/common/error.hpp"
#include "marketpalace/common/files.hpp"
#include "marketpalace/crypto/hash.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/door/attribute.hpp"

namespace mp = marketpalace;

int main(int argc, char** argv) {
  CLI::App app{"Mock attribute issuer"};
  app.require_subcommand(1);

  std::string key_path = "issuer_key.pem";
  bool force = false;
  auto* c_keygen = app.add_subcommand("keygen", "Create the issuer key and print its public half");
  c_keygen->add_option("--out", key_path)->capture_default_str();
  c_keygen->add_flag("--force", force);

  std::string issuer_id = "mock-issuer";
  std::string name = "ssn";
  std::string value;
  std::string subject;
  std::string out;
  auto* c_sign = app.add_subcommand("sign", "Sign an attribute disclosure");
  c_sign->add_option("--key", key_path)->capture_default_str();
  c_sign->add_option("--issuer-id", issuer_id)->capture_default_str();
  c_sign->add_option("--name", name)->capture_default_str();
  c_sign->add_option("--value", value)->required();
  c_sign->add_option("--subject", subject, "Holder binding (default: random)");
  c_sign->add_option("--out", out, "Write the disclosure here instead of stdout");

  auto* c_pub = app.add_subcommand("public-key", "Print the issuer public key (base64 DER)");
  c_pub->add_option("--key", key_path)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (c_keygen->parsed()) {
      if (!force && std::filesystem::exists(key_path)) {
        std::cerr << "error: " << key_path << " exists (use --force)\n";
        return 1;
      }
      auto keys = mp::crypto::generate_keypair(2048);
      mp::write_file_atomic(key_path, keys.private_key.to_pem());
      std::cout << keys.public_key.base64() << "\n";
      return 0;
    }
    auto key = mp::crypto::PrivateKey::from_pem(mp::read_file(key_path));
    if (c_pub->parsed()) {
      std::cout << key.public_key().base64() << "\n";
      return 0;
    }
    if (subject.empty()) subject = mp::hex_encode(mp::crypto::random_bytes(16));
    auto d = mp::door::sign_disclosure(key, issuer_id, name, value, subject);
    std::string text = mp::canonical_dump(d.to_json()) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      mp::write_file_atomic(out, text);
    }
    return 0;
  } catch (const mp::Error& e) {
    std::cerr << "error: " << mp::to_string(e.code()) << ": " << e.detail() << "\n";
    return 1;
  }
}
