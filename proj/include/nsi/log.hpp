#pragma once

#include <sstream>
#include <string>

namespace nsi::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold read once from the NSI_LOG environment variable
/// (error|warn|info|debug or 0..3; default warn).
Level threshold();

void write(Level level, const std::string& message);

template <typename... Args>
void emit(Level level, Args&&... args) {
  if (level > threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}

template <typename... Args>
void warn(Args&&... args) {
  emit(Level::warn, std::forward<Args>(args)...);
}

template <typename... Args>
void info(Args&&... args) {
  emit(Level::info, std::forward<Args>(args)...);
}

template <typename... Args>
void debug(Args&&... args) {
  emit(Level::debug, std::forward<Args>(args)...);
}

}  // namespace nsi::log
