#include "fatt/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace fatt::log {

namespace {

Level parse_level() {
  const char* env = std::getenv("FATT_LOG");
  if (env == nullptr) return Level::warn;
  std::string v(env);
  if (v == "error") return Level::error;
  if (v == "warn") return Level::warn;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

const char* tag(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() {
  static const Level t = parse_level();
  return t;
}

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  std::fprintf(stderr, "fatt [%s] %.*s\n", tag(level),
               static_cast<int>(message.size()), message.data());
}

}  // namespace fatt::log
