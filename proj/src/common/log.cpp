#include "marketpalace/common/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>

namespace marketpalace::log {
namespace {

std::mutex g_mutex;
Sink g_sink;
std::atomic<Level> g_min_level{Level::info};

const char* name(Level l) {
  switch (l) {
    case Level::debug: return "DEBUG";
    case Level::info: return "INFO";
    case Level::warn: return "WARN";
    case Level::error: return "ERROR";
  }
  return "?";
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void set_min_level(Level level) { g_min_level.store(level); }

void write(Level level, std::string_view component, std::string_view message) {
  if (level < g_min_level.load()) return;
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(level, component, message);
    return;
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  std::fprintf(stderr, "%lld.%03lld %-5s [%.*s] %.*s\n", static_cast<long long>(ms / 1000),
               static_cast<long long>(ms % 1000), name(level), static_cast<int>(component.size()),
               component.data(), static_cast<int>(message.size()), message.data());
}

}  // namespace marketpalace::log
