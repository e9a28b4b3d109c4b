#pragma once

#include <string_view>

namespace macrostate {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from MACROSTATE_LOG={error|info|debug}, read once. Default: error.
LogLevel log_level();
bool log_enabled(LogLevel level);
void log_message(LogLevel level, std::string_view message);

inline void log_error(std::string_view m) { log_message(LogLevel::error, m); }
inline void log_info(std::string_view m) { log_message(LogLevel::info, m); }
inline void log_debug(std::string_view m) { log_message(LogLevel::debug, m); }

}  // namespace macrostate
