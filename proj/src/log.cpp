#include "macrostate/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace macrostate {

namespace {

LogLevel parse_level() {
  const char* env = std::getenv("MACROSTATE_LOG");
  if (env == nullptr) return LogLevel::error;
  std::string v(env);
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  return LogLevel::error;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::error: return "error";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
  }
  return "?";
}

std::mutex log_mutex;

}  // namespace

LogLevel log_level() {
  static LogLevel level = parse_level();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_message(LogLevel level, std::string_view message) {
  if (!log_enabled(level)) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "macrostate [" << tag(level) << "] " << message << "\n";
}

}  // namespace macrostate
