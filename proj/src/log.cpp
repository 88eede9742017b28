#include "tdnetgen/log.hpp"

#include <spdlog/spdlog.h>

#include "tdnetgen/error.hpp"

namespace tdnetgen::log {

void debug(const std::string& msg) { spdlog::debug(msg); }
void info(const std::string& msg) { spdlog::info(msg); }
void warn(const std::string& msg) { spdlog::warn(msg); }

void set_level(const std::string& level) {
  const auto lv = spdlog::level::from_str(level);
  if (lv == spdlog::level::off && level != "off") throw ConfigError("unknown log level '" + level + "'");
  spdlog::set_level(lv);
}

}  // namespace tdnetgen::log
