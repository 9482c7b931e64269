#pragma once

#include <map>
#include <string>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/crypto/keys.hpp"

namespace marketpalace::door {

// An issuer-signed attribute presented during registration. The issuer
// signs canonical {attribute_name, attribute_value, issuer_id, subject};
// `subject` is an opaque holder identifier chosen by the issuer.
struct AttributeDisclosure {
  std::string attribute_name;
  std::string attribute_value;
  std::string subject;
  std::string issuer_id;
  Bytes issuer_signature;

  Bytes signed_material() const;
  Json to_json() const;
  static AttributeDisclosure from_json(const Json& j);
};

AttributeDisclosure sign_disclosure(const crypto::PrivateKey& issuer_key, std::string issuer_id,
                                    std::string attribute_name, std::string attribute_value,
                                    std::string subject);

enum class AssertionStatus { valid, unknown_issuer, bad_signature };

std::string_view to_string(AssertionStatus s) noexcept;

class AttributeVerifier {
 public:
  virtual ~AttributeVerifier() = default;
  virtual AssertionStatus verify(const AttributeDisclosure& d) const = 0;
};

// Accepts disclosures whose issuer_id maps to a configured public key and
// whose signature verifies under it.
class TrustedIssuerVerifier final : public AttributeVerifier {
 public:
  void trust(std::string issuer_id, crypto::PublicKey key);
  AssertionStatus verify(const AttributeDisclosure& d) const override;

 private:
  std::map<std::string, crypto::PublicKey, std::less<>> issuers_;
};

}  // namespace marketpalace::door
