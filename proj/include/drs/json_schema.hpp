#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace drs {

// Validates a value against the schema subset used for model replies:
// type, enum, properties, required, additionalProperties (bool or
// schema), items, minItems/maxItems, minimum/maximum, minLength.
// Returns human-readable violations ("$.ratings.alignment: expected
// boolean"); empty means valid.
std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& value);

inline bool matches_schema(const nlohmann::json& schema, const nlohmann::json& value) {
    return schema_violations(schema, value).empty();
}

} // namespace drs
