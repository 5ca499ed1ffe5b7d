#pragma once

#include <string>

namespace agentcourt {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

// Minimal stderr logger. One line per event: "LEVEL component: message".
namespace logging {

void set_level(LogLevel level);
LogLevel level();

void log(LogLevel level, const std::string& component, const std::string& message);

inline void debug(const std::string& component, const std::string& message) { log(LogLevel::debug, component, message); }
inline void info(const std::string& component, const std::string& message) { log(LogLevel::info, component, message); }
inline void warn(const std::string& component, const std::string& message) { log(LogLevel::warn, component, message); }
inline void error(const std::string& component, const std::string& message) { log(LogLevel::error, component, message); }

}  // namespace logging

}  // namespace agentcourt
