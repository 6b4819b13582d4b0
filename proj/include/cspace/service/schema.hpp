#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cspace {

/// Validates `doc` against a JSON Schema subset: type (string or list),
/// properties, required, additionalProperties (bool or schema), items,
/// enum, minimum, maximum, minItems, maxItems and local "#/definitions/x"
/// references. Returns one message per violation, prefixed by its JSON
/// pointer; empty when valid.
std::vector<std::string> validate_schema(const nlohmann::json& schema, const nlohmann::json& doc);

}  // namespace cspace
