#pragma once

#include <cstdio>
#include <mutex>
#include <string>

namespace nectar {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

// Operational log to stderr. Download logs are data and never go here.
class Log {
  public:
    static LogLevel &threshold() {
        static LogLevel level = LogLevel::info;
        return level;
    }

    static void write(LogLevel level, const std::string &msg) {
        if (level < threshold()) return;
        static std::mutex mu;
        static const char *names[] = {"debug", "info", "warn", "error"};
        std::lock_guard lock(mu);
        std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
    }
};

inline void log_debug(const std::string &m) { Log::write(LogLevel::debug, m); }
inline void log_info(const std::string &m) { Log::write(LogLevel::info, m); }
inline void log_warn(const std::string &m) { Log::write(LogLevel::warn, m); }
inline void log_error(const std::string &m) { Log::write(LogLevel::error, m); }

} // namespace nectar
