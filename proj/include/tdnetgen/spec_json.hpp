#pragma once

// JSON mappings of the simulation specs; missing keys keep their defaults.

#include <json.hpp>

#include "tdnetgen/dataset.hpp"
#include "tdnetgen/dynamics.hpp"
#include "tdnetgen/graph.hpp"

namespace tdnetgen::netgen {
void to_json(nlohmann::json& j, const Range& r);
void from_json(const nlohmann::json& j, Range& r);
void to_json(nlohmann::json& j, const IntRange& r);
void from_json(const nlohmann::json& j, IntRange& r);
void to_json(nlohmann::json& j, const TopologySpec& s);
void from_json(const nlohmann::json& j, TopologySpec& s);
}  // namespace tdnetgen::netgen

namespace tdnetgen::dynsim {
void to_json(nlohmann::json& j, const DynamicsSpec& s);
void from_json(const nlohmann::json& j, DynamicsSpec& s);
void to_json(nlohmann::json& j, const SimConfig& s);
void from_json(const nlohmann::json& j, SimConfig& s);
void to_json(nlohmann::json& j, const LabelRule& s);
void from_json(const nlohmann::json& j, LabelRule& s);
}  // namespace tdnetgen::dynsim

namespace tdnetgen::dataset {
void to_json(nlohmann::json& j, const PoolCounts& c);
void from_json(const nlohmann::json& j, PoolCounts& c);
}  // namespace tdnetgen::dataset
