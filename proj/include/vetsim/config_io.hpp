#pragma once

// JSON form of ScenarioConfig. A document may name a preset under "preset";
// the preset is expanded first and the remaining keys are merged over it.

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "vetsim/scenario.hpp"

namespace vetsim {

using Json = nlohmann::ordered_json;

/// Complete, stable-order echo of a configuration.
Json config_to_json(const ScenarioConfig& c);

/// Strict parse of a complete document: unknown or missing keys are errors.
/// Throws ConfigInvalid / ConfigParse.
ScenarioConfig config_from_json(const Json& j);

/// Expands an optional "preset" key and merges the rest of the document over
/// it, producing a complete document.
Json resolve_document(const Json& partial);

/// Applies "a.b.c=value". The value is read as JSON when it parses, as a
/// plain string otherwise. Numeric path segments index arrays.
void apply_override(Json& doc, std::string_view assignment);

/// Throws ConfigParse on malformed JSON.
Json parse_json_text(const std::string& text);

}  // namespace vetsim
