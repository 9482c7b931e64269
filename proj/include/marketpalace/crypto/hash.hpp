#pragma once

#include <cstddef>
#include <cstdint>

#include "marketpalace/common/bytes.hpp"

namespace marketpalace::crypto {

Digest sha256(ByteView data);
Bytes random_bytes(std::size_t n);
std::uint64_t random_u64();

}  // namespace marketpalace::crypto
