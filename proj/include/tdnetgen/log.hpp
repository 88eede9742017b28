#pragma once

// Thin logging facade. Translation units that include libtorch cannot include
// spdlog directly (libtorch ships its own fmt), so they log through here.

#include <cstdio>
#include <string>

namespace tdnetgen::log {

void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);
/// Accepts "debug", "info", "warn", "error" or "off".
void set_level(const std::string& level);

/// printf-style formatting into a std::string.
template <typename... Args>
std::string strf(const char* format, Args... args) {
  const int n = std::snprintf(nullptr, 0, format, args...);
  std::string out(static_cast<std::size_t>(n > 0 ? n : 0), '\0');
  std::snprintf(out.data(), out.size() + 1, format, args...);
  return out;
}

}  // namespace tdnetgen::log
