#include "agentcourt/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace agentcourt::logging {

namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::info)};
std::mutex g_mutex;

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::debug: return "DEBUG";
        case LogLevel::info: return "INFO";
        case LogLevel::warn: return "WARN";
        case LogLevel::error: return "ERROR";
    }
    return "?";
}

}  // namespace

void set_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

LogLevel level() { return static_cast<LogLevel>(g_level.load()); }

void log(LogLevel level, const std::string& component, const std::string& message) {
    if (static_cast<int>(level) < g_level.load()) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "%s %s: %s\n", level_name(level), component.c_str(), message.c_str());
}

}  // namespace agentcourt::logging
