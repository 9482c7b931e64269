#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace marketpalace {

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file, fsyncs, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace marketpalace
