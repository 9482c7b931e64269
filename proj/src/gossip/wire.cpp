#include "marketpalace/gossip/wire.hpp"

#include "marketpalace/common/error.hpp"

namespace marketpalace::gossip {
namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

MessageType checked_type(std::uint8_t raw) {
  if (raw < 1 || raw > 7) throw Error(Errc::parse, "unknown message type " + std::to_string(raw));
  return static_cast<MessageType>(raw);
}

std::uint32_t checked_length(const std::uint8_t* header) {
  std::uint32_t len = read_be32(header);
  if (len > kMaxFrameLength) throw Error(Errc::oversize, "frame length " + std::to_string(len));
  if (len == 0) throw Error(Errc::parse, "empty frame");
  return len;
}

}  // namespace

std::string_view to_string(MessageType t) noexcept {
  switch (t) {
    case MessageType::hello: return "hello";
    case MessageType::hello_ack: return "hello-ack";
    case MessageType::push: return "push";
    case MessageType::push_ack: return "push-ack";
    case MessageType::envelope: return "envelope";
    case MessageType::peers_request: return "peers-request";
    case MessageType::peers_response: return "peers-response";
  }
  return "unknown";
}

WireMessage WireMessage::make(MessageType type, const Json& body) {
  return WireMessage{type, canonical_dump(body)};
}

Json WireMessage::json() const { return parse_json(payload); }

Bytes frame_encode(const WireMessage& msg) {
  std::size_t len = msg.payload.size() + 1;
  if (len > kMaxFrameLength) throw Error(Errc::oversize, "payload too large for one frame");
  Bytes out;
  out.reserve(kFrameHeaderSize + len);
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.push_back(static_cast<std::uint8_t>(msg.type));
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

WireMessage frame_decode(ByteView bytes) {
  if (bytes.size() < kFrameHeaderSize) throw Error(Errc::incomplete_frame, "missing length prefix");
  std::uint32_t len = checked_length(bytes.data());
  if (bytes.size() < kFrameHeaderSize + len) throw Error(Errc::incomplete_frame, "frame body truncated");
  if (bytes.size() > kFrameHeaderSize + len) throw Error(Errc::parse, "trailing bytes after frame");
  WireMessage msg;
  msg.type = checked_type(bytes[kFrameHeaderSize]);
  msg.payload.assign(reinterpret_cast<const char*>(bytes.data()) + kFrameHeaderSize + 1, len - 1);
  return msg;
}

void FrameDecoder::feed(ByteView bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<WireMessage> FrameDecoder::next() {
  std::size_t avail = buffer_.size() - offset_;
  if (avail < kFrameHeaderSize) return std::nullopt;
  const std::uint8_t* base = buffer_.data() + offset_;
  std::uint32_t len = checked_length(base);
  if (avail < kFrameHeaderSize + len) return std::nullopt;
  WireMessage msg;
  msg.type = checked_type(base[kFrameHeaderSize]);
  msg.payload.assign(reinterpret_cast<const char*>(base) + kFrameHeaderSize + 1, len - 1);
  offset_ += kFrameHeaderSize + len;
  if (offset_ > (1u << 20) && offset_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(offset_));
    offset_ = 0;
  }
  return msg;
}

}  // namespace marketpalace::gossip
