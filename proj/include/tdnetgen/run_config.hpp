#pragma once

// Run configuration file: one JSON object holding every stage's settings.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdnetgen/benchmark.hpp"

namespace tdnetgen {

inline constexpr int kRunSchemaVersion = 1;

struct SweepSettings {
  std::string axis = "n_labeled";
  std::vector<double> values{20, 40, 60, 80, 100};
};

struct RunConfig {
  eval::ExperimentConfig experiment;
  SweepSettings sweep;
  std::string log_level = "info";

  void validate() const;
};

/// Absent keys keep their defaults; unknown keys, wrong types and invalid
/// values throw ConfigError naming the JSON path (e.g. "/augment/guidance/lambda").
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// Reads and validates a config file; parse errors are ConfigErrors too.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace tdnetgen
