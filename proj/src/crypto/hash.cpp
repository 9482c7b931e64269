#include "marketpalace/crypto/hash.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>

#include "marketpalace/common/error.hpp"

namespace marketpalace::crypto {

Digest sha256(ByteView data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::io, "SHA-256 failed");
  }
  return out;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw Error(Errc::io, "CSPRNG failure");
  }
  return out;
}

std::uint64_t random_u64() {
  Bytes b = random_bytes(8);
  std::uint64_t v = 0;
  std::memcpy(&v, b.data(), sizeof v);
  return v;
}

}  // namespace marketpalace::crypto
