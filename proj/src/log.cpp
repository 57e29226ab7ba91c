#include "clonedet/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace clonedet::log {

namespace {

Level parse_level() {
  const char* env = std::getenv("CLONEDET_LOG_LEVEL");
  if (env == nullptr) return Level::Info;
  if (std::strcmp(env, "error") == 0) return Level::Error;
  if (std::strcmp(env, "warn") == 0) return Level::Warn;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  return Level::Info;
}

void emit(Level at, const char* tag, const std::string& message) {
  if (static_cast<int>(at) > static_cast<int>(level())) return;
  std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
}

}  // namespace

Level level() {
  static const Level cached = parse_level();
  return cached;
}

void error(const std::string& message) { emit(Level::Error, "error", message); }
void warn(const std::string& message) { emit(Level::Warn, "warn", message); }
void info(const std::string& message) { emit(Level::Info, "info", message); }
void debug(const std::string& message) { emit(Level::Debug, "debug", message); }

}  // namespace clonedet::log
