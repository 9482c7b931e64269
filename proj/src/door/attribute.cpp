#include "marketpalace/door/attribute.hpp"

namespace marketpalace::door {

Bytes AttributeDisclosure::signed_material() const {
  return canonical_bytes(Json{{"attribute_name", attribute_name},
                              {"attribute_value", attribute_value},
                              {"issuer_id", issuer_id},
                              {"subject", subject}});
}

Json AttributeDisclosure::to_json() const {
  return Json{{"attribute_name", attribute_name},
              {"attribute_value", attribute_value},
              {"issuer_id", issuer_id},
              {"issuer_signature", base64_encode(issuer_signature)},
              {"subject", subject}};
}

AttributeDisclosure AttributeDisclosure::from_json(const Json& j) {
  ObjectReader r(j, "attribute_disclosure");
  AttributeDisclosure d;
  d.attribute_name = r.string("attribute_name");
  d.attribute_value = r.string("attribute_value");
  d.issuer_id = r.string("issuer_id");
  d.issuer_signature = r.bytes("issuer_signature");
  d.subject = r.string("subject");
  r.finish();
  return d;
}

AttributeDisclosure sign_disclosure(const crypto::PrivateKey& issuer_key, std::string issuer_id,
                                    std::string attribute_name, std::string attribute_value,
                                    std::string subject) {
  AttributeDisclosure d{std::move(attribute_name), std::move(attribute_value), std::move(subject),
                        std::move(issuer_id), {}};
  d.issuer_signature = crypto::sign_detached(issuer_key, d.signed_material());
  return d;
}

std::string_view to_string(AssertionStatus s) noexcept {
  switch (s) {
    case AssertionStatus::valid: return "valid";
    case AssertionStatus::unknown_issuer: return "unknown-issuer";
    case AssertionStatus::bad_signature: return "bad-signature";
  }
  return "unknown";
}

void TrustedIssuerVerifier::trust(std::string issuer_id, crypto::PublicKey key) {
  issuers_.insert_or_assign(std::move(issuer_id), std::move(key));
}

AssertionStatus TrustedIssuerVerifier::verify(const AttributeDisclosure& d) const {
  auto it = issuers_.find(d.issuer_id);
  if (it == issuers_.end()) return AssertionStatus::unknown_issuer;
  return crypto::verify_detached(it->second, d.signed_material(), d.issuer_signature)
             ? AssertionStatus::valid
             : AssertionStatus::bad_signature;
}

}  // namespace marketpalace::door
