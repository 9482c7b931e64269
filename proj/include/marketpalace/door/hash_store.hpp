#pragma once

#include <filesystem>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_set>

namespace marketpalace::door {

/// Lowercase hex SHA-256 of the exact UTF-8 bytes of `value`. No salt, no
/// normalization: duplicate detection depends on determinism.
std::string attribute_hash(std::string_view value);

// Append-only set of 64-char lowercase hex digests, one LF-terminated line
// per record. The file is locked exclusively for the lifetime of the store
// so only one process can write it.
//
// On open, an unterminated or malformed final line (a write torn by a crash)
// is truncated away; malformed lines anywhere else are corrupt data.
class HashStore {
 public:
  explicit HashStore(std::filesystem::path path);
  ~HashStore();
  HashStore(const HashStore&) = delete;
  HashStore& operator=(const HashStore&) = delete;

  /// Returns true if inserted (and fsynced), false if already present.
  /// Throws Error(encoding) unless `hex` is 64 lowercase hex characters.
  bool insert_if_absent(std::string_view hex);
  bool contains(std::string_view hex) const;
  std::size_t size() const;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void load();

  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::unordered_set<std::string> hashes_;
};

}  // namespace marketpalace::door
