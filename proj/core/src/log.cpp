#include "receptive/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace receptive {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("RECEPTIVE_JITAI_LOG");
    if (env == nullptr) return LogLevel::Warn;
    if (std::strcmp(env, "off") == 0) return LogLevel::Off;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = "info";
  switch (level) {
    case LogLevel::Error: tag = "error"; break;
    case LogLevel::Warn: tag = "warn"; break;
    case LogLevel::Info: tag = "info"; break;
    case LogLevel::Debug: tag = "debug"; break;
    case LogLevel::Off: return;
  }
  std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
}

}  // namespace receptive
