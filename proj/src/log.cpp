#include "nsi/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace nsi::log {

namespace {

Level parse_level(const char* value) {
  if (!value) return Level::warn;
  const std::string v(value);
  if (v == "error" || v == "0") return Level::error;
  if (v == "warn" || v == "1") return Level::warn;
  if (v == "info" || v == "2") return Level::info;
  if (v == "debug" || v == "3") return Level::debug;
  return Level::warn;
}

const char* label(Level level) {
  switch (level) {
    case Level::error:
      return "error";
    case Level::warn:
      return "warn";
    case Level::info:
      return "info";
    case Level::debug:
      return "debug";
  }
  return "?";
}

std::mutex& mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Level threshold() {
  static const Level level = parse_level(std::getenv("NSI_LOG"));
  return level;
}

void write(Level level, const std::string& message) {
  std::lock_guard<std::mutex> lock(mutex());
  std::cerr << "[nsi " << label(level) << "] " << message << "\n";
}

}  // namespace nsi::log
