#pragma once

#include <string>

namespace clonedet::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Active level comes from the CLONEDET_LOG_LEVEL environment variable
// (error|warn|info|debug), default info. Read once per process.
Level level();

void error(const std::string& message);
void warn(const std::string& message);
void info(const std::string& message);
void debug(const std::string& message);

}  // namespace clonedet::log
