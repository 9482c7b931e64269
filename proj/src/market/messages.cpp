#include "marketpalace/market/messages.hpp"

#include <algorithm>

#include "marketpalace/common/error.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::market {

Bid Bid::create(const ContentId& content_id, std::int64_t amount, std::string currency,
                const Digest& bidder_fingerprint, std::int64_t created_at) {
  if (amount < 0) throw Error(Errc::validation, "bid amount must be non-negative");
  if (!is_currency_code(currency)) throw Error(Errc::validation, "currency must be an ISO-4217 code");
  Bid b;
  b.content_id_ = content_id;
  b.amount_ = amount;
  b.currency_ = std::move(currency);
  b.bidder_fingerprint_ = bidder_fingerprint;
  b.created_at_ = created_at;
  return b;
}

Json Bid::to_json() const {
  return Json{{"amount", amount_},
              {"bidder_fingerprint", hex_encode(bidder_fingerprint_)},
              {"content_id", content_id_.hex()},
              {"created_at", created_at_},
              {"currency", currency_}};
}

Bid Bid::from_json(const Json& j) {
  ObjectReader r(j, "bid");
  auto amount = r.integer("amount");
  auto bidder = r.digest_hex("bidder_fingerprint");
  auto id = ContentId(r.digest_hex("content_id"));
  auto created_at = r.integer("created_at");
  auto currency = r.string("currency");
  r.finish();
  try {
    return create(id, amount, std::move(currency), bidder, created_at);
  } catch (const Error& e) {
    throw Error(Errc::parse, "bid: " + e.detail());
  }
}

Bytes make_bid_payload(const Bid& bid) { return canonical_bytes(bid.to_json()); }

Bid parse_bid_payload(ByteView payload) { return Bid::from_json(parse_json(marketpalace::to_string(payload))); }

Digest chat_channel_id(const Digest& fp_a, const Digest& fp_b, const ContentId& content_id) {
  if (fp_a == fp_b) throw Error(Errc::validation, "a chat channel needs two distinct participants");
  const Digest& lo = std::min(fp_a, fp_b);
  const Digest& hi = std::max(fp_a, fp_b);
  Bytes material;
  material.reserve(96);
  material.insert(material.end(), lo.begin(), lo.end());
  material.insert(material.end(), hi.begin(), hi.end());
  material.insert(material.end(), content_id.digest().begin(), content_id.digest().end());
  return crypto::sha256(material);
}

void ChatMessage::validate() const {
  if (body.empty()) throw Error(Errc::validation, "chat body must not be empty");
  if (utf8_chars(body) > kMaxChatBodyChars) throw Error(Errc::validation, "chat body exceeds 4096 characters");
}

Json ChatMessage::to_json() const {
  return Json{{"body", body},
              {"channel_id", hex_encode(channel_id)},
              {"content_id", content_id.hex()},
              {"sent_at", sent_at}};
}

ChatMessage ChatMessage::from_json(const Json& j) {
  ObjectReader r(j, "chat_message");
  ChatMessage m;
  m.body = r.string("body");
  m.channel_id = r.digest_hex("channel_id");
  m.content_id = ContentId(r.digest_hex("content_id"));
  m.sent_at = r.integer("sent_at");
  r.finish();
  try {
    m.validate();
  } catch (const Error& e) {
    throw Error(Errc::parse, "chat_message: " + e.detail());
  }
  return m;
}

Bytes DirectMessage::encode() const {
  if (bid && !chat) return canonical_bytes(Json{{"bid", bid->to_json()}, {"kind", "bid"}});
  if (chat && !bid) return canonical_bytes(Json{{"chat", chat->to_json()}, {"kind", "chat"}});
  throw Error(Errc::validation, "direct message must carry exactly one of bid or chat");
}

DirectMessage DirectMessage::decode(ByteView payload) {
  Json j = parse_json(marketpalace::to_string(payload));
  ObjectReader r(j, "direct_message");
  std::string kind = r.string("kind");
  DirectMessage m;
  if (kind == "bid") {
    m.bid = Bid::from_json(r.object("bid"));
  } else if (kind == "chat") {
    m.chat = ChatMessage::from_json(r.object("chat"));
  } else {
    throw Error(Errc::parse, "unknown direct message kind '" + kind + "'");
  }
  r.finish();
  return m;
}

Json ChatEntry::to_json() const {
  Json j{{"at", at}, {"body", body}, {"from", hex_encode(from)}, {"kind", kind}};
  if (amount) {
    j["amount"] = *amount;
    j["currency"] = currency;
  }
  return j;
}

Json Channel::summary_json() const {
  return Json{{"channel_id", hex_encode(channel_id)},
              {"content_id", content_id.hex()},
              {"messages", entries.size()},
              {"peer", hex_encode(peer)}};
}

Json Channel::to_json() const {
  Json j = summary_json();
  Json arr = Json::array();
  for (const auto& e : entries) arr.push_back(e.to_json());
  j["entries"] = arr;
  return j;
}

Digest ChatBook::open(const Digest& peer, const ContentId& content_id) {
  Digest id = chat_channel_id(self_, peer, content_id);
  std::lock_guard lock(mutex_);
  auto [it, inserted] = channels_.try_emplace(id);
  if (inserted) {
    it->second.channel_id = id;
    it->second.content_id = content_id;
    it->second.self = self_;
    it->second.peer = peer;
  }
  return id;
}

void ChatBook::record(const Digest& channel_id, ChatEntry entry) {
  std::lock_guard lock(mutex_);
  auto it = channels_.find(channel_id);
  if (it == channels_.end()) throw Error(Errc::not_found, "unknown chat channel");
  it->second.entries.push_back(std::move(entry));
}

std::optional<Channel> ChatBook::get(const Digest& channel_id) const {
  std::lock_guard lock(mutex_);
  auto it = channels_.find(channel_id);
  if (it == channels_.end()) return std::nullopt;
  return it->second;
}

std::vector<Channel> ChatBook::channels() const {
  std::lock_guard lock(mutex_);
  std::vector<Channel> out;
  for (const auto& [id, c] : channels_) out.push_back(c);
  return out;
}

}  // namespace marketpalace::market
