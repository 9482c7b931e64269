#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace marketpalace::log {

enum class Level { debug, info, warn, error };

using Sink = std::function<void(Level, std::string_view component, std::string_view message)>;

/// Replaces the process-wide sink (stderr by default). Pass nullptr to restore it.
void set_sink(Sink sink);
void set_min_level(Level level);
void write(Level level, std::string_view component, std::string_view message);

inline void debug(std::string_view c, std::string_view m) { write(Level::debug, c, m); }
inline void info(std::string_view c, std::string_view m) { write(Level::info, c, m); }
inline void warn(std::string_view c, std::string_view m) { write(Level::warn, c, m); }
inline void error(std::string_view c, std::string_view m) { write(Level::error, c, m); }

}  // namespace marketpalace::log
