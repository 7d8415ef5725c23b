#pragma once

#include <string>

namespace receptive {

enum class LogLevel { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

// Verbosity comes from the RECEPTIVE_JITAI_LOG environment variable
// (off|error|warn|info|debug); default is warn.
LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

inline void log_info(const std::string& message) { log_message(LogLevel::Info, message); }
inline void log_warn(const std::string& message) { log_message(LogLevel::Warn, message); }
inline void log_debug(const std::string& message) { log_message(LogLevel::Debug, message); }

}  // namespace receptive
