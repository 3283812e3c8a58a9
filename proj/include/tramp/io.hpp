#pragma once

#include <string>

#include <json.hpp>

#include "tramp/instance.hpp"
#include "tramp/scenario.hpp"

namespace tramp {

inline constexpr int kSchemaVersion = 1;

nlohmann::json instance_to_json(const InstanceData& instance);
InstanceData instance_from_json(const nlohmann::json& j);

nlohmann::json scenarios_to_json(const ScenarioSet& set);
ScenarioSet scenarios_from_json(const nlohmann::json& j);

/// Hex SHA-256 of a string.
std::string sha256_hex(const std::string& data);

/// Hash of the canonical serialization (sorted keys, shortest round-trip
/// numbers), so equal instances hash equally regardless of file formatting.
std::string content_hash(const InstanceData& instance);
std::string content_hash(const ScenarioSet& set);

std::string read_text_file(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::string& path, const std::string& text);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace tramp
