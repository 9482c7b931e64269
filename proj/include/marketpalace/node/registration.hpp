#pragma once

#include <optional>

#include "marketpalace/common/clock.hpp"
#include "marketpalace/crypto/certified_key.hpp"
#include "marketpalace/crypto/keys.hpp"
#include "marketpalace/door/attribute.hpp"
#include "marketpalace/node/config.hpp"

namespace marketpalace::node {

enum class RegistrationStatus { registered, already_registered, duplicate_identity };

struct RegistrationResult {
  RegistrationStatus status = RegistrationStatus::registered;
  std::optional<crypto::KeyBundle> bundle;
};

// Runs start_session, disclose and complete against the configured door.
// A session token that has been disclosed but not completed is remembered
// in <data_dir>/registration_pending.json so a retry after a network
// failure finishes the same session instead of tripping the duplicate check.
// Throws Error(unreachable) on network failure; nothing but that pending
// record is written before the bundle.
RegistrationResult register_with_door(const NodeConfig& config, const crypto::PrivateKey& key,
                                      const door::AttributeDisclosure& disclosure, const Clock& clock);

}  // namespace marketpalace::node
