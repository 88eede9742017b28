#pragma once

// Typed reads from a JSON object with errors that name the offending path.

#include <set>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "tdnetgen/error.hpp"

namespace tdnetgen {

class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  /// Leaves `out` untouched when the key is absent.
  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    const std::string at = where(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(at + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.template get<long long>() >= 0))
        throw ConfigError(at + ": expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(at + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(at + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(at + ": expected a string");
    }
    try {
      out = v.template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(at + ": " + e.what());
    }
  }

  /// Reader for a nested object (an empty object when absent).
  JsonReader child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return JsonReader(empty(), where(key));
    return JsonReader(j_.at(key), where(key));
  }

  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  /// Rejects keys that were never requested.
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(where(key.c_str()) + ": unknown key");
  }

  std::string where(const char* key = nullptr) const {
    const std::string base = path_.empty() ? "" : path_;
    return key ? base + "/" + key : (base.empty() ? "/" : base);
  }

 private:
  static const nlohmann::json& empty() {
    static const nlohmann::json e = nlohmann::json::object();
    return e;
  }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace tdnetgen
