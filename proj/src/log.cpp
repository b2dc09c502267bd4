#include "elstm/log.hpp"

#include <atomic>
#include <iostream>

namespace elstm::log {

namespace {

std::atomic<Level> g_level{Level::warn};

void emit(Level at, const char* tag, std::string_view message) {
    if (at < g_level.load()) return;
    std::clog << '[' << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void debug(std::string_view message) { emit(Level::debug, "debug", message); }
void info(std::string_view message) { emit(Level::info, "info", message); }
void warn(std::string_view message) { emit(Level::warn, "warn", message); }
void error(std::string_view message) { emit(Level::error, "error", message); }

}  // namespace elstm::log
