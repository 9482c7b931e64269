#include "marketpalace/door/hash_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "marketpalace/common/bytes.hpp"
#include "marketpalace/common/error.hpp"
#include "marketpalace/crypto/hash.hpp"

namespace marketpalace::door {

std::string attribute_hash(std::string_view value) {
  return hex_encode(crypto::sha256(as_bytes(value)));
}

HashStore::HashStore(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
  if (fd_ < 0) throw Error(Errc::io, "open " + path_.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    throw Error(Errc::io, "hash store " + path_.string() + " is locked by another writer");
  }
  try {
    load();
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

HashStore::~HashStore() {
  if (fd_ >= 0) ::close(fd_);
}

void HashStore::load() {
  std::string contents;
  char buf[1 << 16];
  off_t offset = 0;
  for (;;) {
    ssize_t n = ::pread(fd_, buf, sizeof buf, offset);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io, "read " + path_.string() + ": " + std::strerror(errno));
    }
    if (n == 0) break;
    contents.append(buf, static_cast<std::size_t>(n));
    offset += n;
  }

  std::size_t good_end = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string::npos) break;  // torn final write
    std::string_view line(contents.data() + pos, nl - pos);
    if (!is_lower_hex_digest(line)) {
      if (nl + 1 == contents.size()) break;  // torn final record
      throw Error(Errc::corrupt_data, "malformed record in " + path_.string());
    }
    hashes_.emplace(line);
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end != contents.size()) {
    if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0) {
      throw Error(Errc::io, "truncate " + path_.string() + ": " + std::strerror(errno));
    }
    ::fsync(fd_);
  }
}

bool HashStore::insert_if_absent(std::string_view hex) {
  if (!is_lower_hex_digest(hex)) {
    throw Error(Errc::encoding, "hash record must be 64 lowercase hex characters");
  }
  std::unique_lock lock(mutex_);
  if (hashes_.contains(std::string(hex))) return false;

  std::string line(hex);
  line.push_back('\n');
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io, "append " + path_.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) {
    throw Error(Errc::io, "fsync " + path_.string() + ": " + std::strerror(errno));
  }
  hashes_.emplace(hex);
  return true;
}

bool HashStore::contains(std::string_view hex) const {
  std::shared_lock lock(mutex_);
  return hashes_.contains(std::string(hex));
}

std::size_t HashStore::size() const {
  std::shared_lock lock(mutex_);
  return hashes_.size();
}

}  // namespace marketpalace::door
