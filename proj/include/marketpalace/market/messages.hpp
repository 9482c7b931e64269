#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"
#include "marketpalace/market/listing.hpp"

namespace marketpalace::market {

// Advisory offer on a listing, carried inside an envelope to the owner.
// Canonical form: {amount, bidder_fingerprint, content_id, created_at, currency}.
class Bid {
 public:
  /// Throws Error(validation) for a negative amount or bad currency code.
  static Bid create(const ContentId& content_id, std::int64_t amount, std::string currency,
                    const Digest& bidder_fingerprint, std::int64_t created_at);

  const ContentId& content_id() const noexcept { return content_id_; }
  std::int64_t amount() const noexcept { return amount_; }
  const std::string& currency() const noexcept { return currency_; }
  const Digest& bidder_fingerprint() const noexcept { return bidder_fingerprint_; }
  std::int64_t created_at() const noexcept { return created_at_; }

  Json to_json() const;
  /// Rejects unknown fields and out-of-bounds values with Error(parse).
  static Bid from_json(const Json& j);

  friend bool operator==(const Bid&, const Bid&) = default;

 private:
  Bid() = default;

  ContentId content_id_;
  std::int64_t amount_ = 0;
  std::string currency_;
  Digest bidder_fingerprint_{};
  std::int64_t created_at_ = 0;
};

Bytes make_bid_payload(const Bid& bid);
/// Throws Error(parse) for malformed JSON, missing or unknown fields.
Bid parse_bid_payload(ByteView payload);

inline constexpr std::size_t kMaxChatBodyChars = 4096;

/// SHA-256(min(a,b) || max(a,b) || content_id), raw bytes. Symmetric in
/// (a, b). Throws Error(validation) when a == b.
Digest chat_channel_id(const Digest& fp_a, const Digest& fp_b, const ContentId& content_id);

// Chat line. The receiver recomputes channel_id from (sender, self,
// content_id).
struct ChatMessage {
  Digest channel_id{};
  ContentId content_id;
  std::string body;
  std::int64_t sent_at = 0;

  void validate() const;
  Json to_json() const;
  static ChatMessage from_json(const Json& j);

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Plaintext inside an envelope: {"kind": "bid", "bid": {...}} or
// {"kind": "chat", "chat": {...}}.
struct DirectMessage {
  std::optional<Bid> bid;
  std::optional<ChatMessage> chat;

  Bytes encode() const;
  static DirectMessage decode(ByteView payload);
};

struct ChatEntry {
  Digest from{};
  std::string kind;  // "bid" or "chat"
  std::string body;  // chat text, or "<amount> <currency>" for bids
  std::optional<std::int64_t> amount;
  std::string currency;
  std::int64_t at = 0;

  Json to_json() const;
};

struct Channel {
  Digest channel_id{};
  ContentId content_id;
  Digest self{};
  Digest peer{};
  std::vector<ChatEntry> entries;

  Json summary_json() const;
  Json to_json() const;
};

// Chat channels of one node (the chat manager). Thread-safe.
class ChatBook {
 public:
  explicit ChatBook(const Digest& self) : self_(self) {}

  /// Opens the channel with `peer` about `content_id` if needed; returns its id.
  Digest open(const Digest& peer, const ContentId& content_id);
  void record(const Digest& channel_id, ChatEntry entry);
  std::optional<Channel> get(const Digest& channel_id) const;
  std::vector<Channel> channels() const;

 private:
  Digest self_;
  mutable std::mutex mutex_;
  std::map<Digest, Channel> channels_;
};

}  // namespace marketpalace::market
