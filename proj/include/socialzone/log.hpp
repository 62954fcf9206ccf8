#ifndef SOCIALZONE_LOG_HPP
#define SOCIALZONE_LOG_HPP

// Minimal leveled logger writing to stderr. Verbosity comes from SOCIALZONE_LOG
// (error | warn | info | debug, default warn).

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string_view>

namespace socialzone::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline Level level_from_env()
{
  const char * env = std::getenv("SOCIALZONE_LOG");
  if (!env) return Level::warn;
  const std::string_view v{env};
  if (v == "error") return Level::error;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

inline Level & threshold()
{
  static Level lvl = level_from_env();
  return lvl;
}

inline void write(Level lvl, std::string_view tag, std::string_view msg)
{
  if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
  static std::mutex mtx;
  std::lock_guard lock(mtx);
  std::cerr << "[socialzone " << tag << "] " << msg << '\n';
}

template<typename... Args>
std::string concat(Args &&... args)
{
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

template<typename... Args>
void error(Args &&... args) { write(Level::error, "error", concat(std::forward<Args>(args)...)); }
template<typename... Args>
void warn(Args &&... args) { write(Level::warn, "warn", concat(std::forward<Args>(args)...)); }
template<typename... Args>
void info(Args &&... args) { write(Level::info, "info", concat(std::forward<Args>(args)...)); }
template<typename... Args>
void debug(Args &&... args) { write(Level::debug, "debug", concat(std::forward<Args>(args)...)); }

}  // namespace socialzone::log

#endif  // SOCIALZONE_LOG_HPP
