#include "fidget/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace fidget {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink = [](LogLevel level, std::string_view msg) {
    static constexpr const char* kNames[] = {"debug", "info", "warning", "error"};
    std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << msg << '\n';
  };
  return sink;
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex());
  LogSink old = std::move(current_sink());
  current_sink() = std::move(sink);
  return old;
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(level, message);
}

}  // namespace fidget
