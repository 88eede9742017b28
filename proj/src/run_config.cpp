#include "tdnetgen/run_config.hpp"

#include <fstream>
#include <sstream>

#include "tdnetgen/error.hpp"
#include "tdnetgen/json_reader.hpp"
#include "tdnetgen/spec_json.hpp"

namespace tdnetgen {

using nlohmann::json;

namespace {

// Spec objects with a to_json/from_json pair: keys must be a subset of the
// serialized default.
template <typename T>
void read_spec(JsonReader& r, const char* key, T& out) {
  if (!r.has(key)) return;
  const auto& v = r.raw(key);
  const auto at = r.where(key);
  if (!v.is_object()) throw ConfigError(at + ": expected an object");
  const json known = out;
  for (const auto& [k, _] : v.items())
    if (!known.contains(k)) throw ConfigError(at + "/" + k + ": unknown key");
  try {
    v.get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(at + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(at + ": " + e.what());
  }
}

std::string policy_name(baselines::ConfidencePolicy p) {
  return p == baselines::ConfidencePolicy::THRESHOLD ? "threshold" : "top_confidence";
}

}  // namespace

void RunConfig::validate() const {
  try {
    experiment.topology.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("/topology: ") + e.what());
  }
  try {
    experiment.dynamics.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("/dynamics: ") + e.what());
  }
  try {
    experiment.sim.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("/sim: ") + e.what());
  }
  try {
    experiment.rule.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("/label_rule: ") + e.what());
  }
  experiment.validate();
  eval::parse_sweep_axis(sweep.axis);
  if (sweep.values.empty()) throw ConfigError("/sweep/values: at least one value required");
}

RunConfig run_config_from_json(const json& j) {
  JsonReader r(j, "");
  int version = -1;
  r.get("schema_version", version);
  if (!r.has("schema_version")) throw ConfigError("/schema_version: required");
  if (version != kRunSchemaVersion)
    throw ConfigError("/schema_version: unsupported version " + std::to_string(version) + " (expected " +
                      std::to_string(kRunSchemaVersion) + ")");
  RunConfig c;
  auto& e = c.experiment;
  read_spec(r, "topology", e.topology);
  read_spec(r, "dynamics", e.dynamics);
  read_spec(r, "sim", e.sim);
  read_spec(r, "label_rule", e.rule);
  read_spec(r, "counts", e.counts);
  r.get("t_obs", e.t_obs);
  r.get("seeds", e.seeds);
  r.get("ablations", e.ablations);
  r.get("log_level", c.log_level);
  if (r.has("augment")) e.pipeline = augment::pipeline_from_json(r.raw("augment"), e.pipeline);
  {
    auto s = r.child("self_train");
    s.get("n_pseudo", e.self_train.n_pseudo);
    std::string policy = policy_name(e.self_train.policy);
    s.get("policy", policy);
    if (policy == "threshold")
      e.self_train.policy = baselines::ConfidencePolicy::THRESHOLD;
    else if (policy == "top_confidence")
      e.self_train.policy = baselines::ConfidencePolicy::TOP_CONFIDENCE;
    else
      throw ConfigError(s.where("policy") + ": expected 'top_confidence' or 'threshold'");
    s.get("threshold", e.self_train.threshold);
    s.get("rounds", e.self_train.rounds);
    s.finish();
  }
  {
    auto s = r.child("sweep");
    s.get("axis", c.sweep.axis);
    s.get("values", c.sweep.values);
    s.finish();
  }
  r.finish();
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  const auto& e = c.experiment;
  return {{"schema_version", kRunSchemaVersion},
          {"topology", e.topology},
          {"dynamics", e.dynamics},
          {"sim", e.sim},
          {"label_rule", e.rule},
          {"counts", e.counts},
          {"t_obs", e.t_obs},
          {"seeds", e.seeds},
          {"ablations", e.ablations},
          {"log_level", c.log_level},
          {"augment", augment::to_json(e.pipeline)},
          {"self_train",
           {{"n_pseudo", e.self_train.n_pseudo},
            {"policy", policy_name(e.self_train.policy)},
            {"threshold", e.self_train.threshold},
            {"rounds", e.self_train.rounds}}},
          {"sweep", {{"axis", c.sweep.axis}, {"values", c.sweep.values}}}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  json j;
  try {
    j = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace tdnetgen
