#ifndef FATT_LOG_HPP
#define FATT_LOG_HPP

#include <string_view>

namespace fatt::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from the FATT_LOG environment variable
// (error|warn|info|debug), read once. Default: warn.
Level threshold();

void write(Level level, std::string_view message);

inline void error(std::string_view m) { write(Level::error, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void debug(std::string_view m) { write(Level::debug, m); }

}  // namespace fatt::log

#endif
