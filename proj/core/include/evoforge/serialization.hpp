#pragma once

// JSON wire forms for domain types. Field names are the canonical names of
// the domain structs.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "evoforge/domain.hpp"

namespace evoforge {

using Json = nlohmann::json;

void to_json(Json& j, const Section& s);
void from_json(const Json& j, Section& s);
void to_json(Json& j, const GameConcept& c);
void from_json(const Json& j, GameConcept& c);
void to_json(Json& j, const PopulationState& p);
void from_json(const Json& j, PopulationState& p);

Json config_to_json(const CampaignConfig& config);

/// Missing keys keep their defaults; unknown keys are ignored. Type errors
/// throw Error(kInvalidConfig) naming the field.
CampaignConfig config_from_json(const Json& j);

/// Reads a configuration document. Relative template paths are resolved
/// against the document's directory.
CampaignConfig load_config_file(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

}  // namespace evoforge
