#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/canonical_json.hpp"

namespace marketpalace::gossip {

// frame = len(u32 big-endian, counts the type byte) || type(u8) || payload
enum class MessageType : std::uint8_t {
  hello = 1,
  hello_ack = 2,
  push = 3,
  push_ack = 4,
  envelope = 5,
  peers_request = 6,
  peers_response = 7,
};

std::string_view to_string(MessageType t) noexcept;

inline constexpr std::size_t kFrameHeaderSize = 4;
inline constexpr std::uint32_t kMaxFrameLength = 16u * 1024u * 1024u;

struct WireMessage {
  MessageType type = MessageType::hello;
  std::string payload;  // canonical JSON, UTF-8

  static WireMessage make(MessageType type, const Json& body);
  /// Parses the payload; throws Error(parse).
  Json json() const;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

/// Throws Error(oversize) if the frame would exceed kMaxFrameLength.
Bytes frame_encode(const WireMessage& msg);

/// Decodes exactly one frame. Error(incomplete_frame) if bytes are missing,
/// Error(oversize) if the declared length exceeds kMaxFrameLength (checked
/// before looking at the body), Error(parse) for an unknown type, an empty
/// frame or trailing bytes.
WireMessage frame_decode(ByteView bytes);

// Incremental decoder for a byte stream.
class FrameDecoder {
 public:
  void feed(ByteView bytes);
  /// Next complete frame, or nullopt if more bytes are needed. Throws like
  /// frame_decode on a bad header; the decoder is unusable afterwards.
  std::optional<WireMessage> next();
  std::size_t buffered() const noexcept { return buffer_.size() - offset_; }

 private:
  Bytes buffer_;
  std::size_t offset_ = 0;
};

}  // namespace marketpalace::gossip
