#include "drs/json_schema.hpp"

namespace drs {

namespace {

using nlohmann::json;

bool type_matches(const std::string& type, const json& value) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "null") return value.is_null();
    return false;
}

void walk(const json& schema, const json& value, const std::string& path,
          std::vector<std::string>& out) {
    if (!schema.is_object()) return; // nothing to enforce

    if (auto it = schema.find("type"); it != schema.end()) {
        if (!type_matches(it->get<std::string>(), value)) {
            out.push_back(path + ": expected " + it->get<std::string>());
            return; // deeper checks would only cascade
        }
    }

    if (auto it = schema.find("enum"); it != schema.end()) {
        bool hit = false;
        for (const auto& option : *it)
            if (option == value) {
                hit = true;
                break;
            }
        if (!hit) {
            out.push_back(path + ": value " + value.dump() + " not in enum " + it->dump());
            return;
        }
    }

    if (value.is_number()) {
        const double x = value.get<double>();
        if (auto it = schema.find("minimum"); it != schema.end() && x < it->get<double>())
            out.push_back(path + ": " + value.dump() + " below minimum " + it->dump());
        if (auto it = schema.find("maximum"); it != schema.end() && x > it->get<double>())
            out.push_back(path + ": " + value.dump() + " above maximum " + it->dump());
    }

    if (value.is_string()) {
        if (auto it = schema.find("minLength");
            it != schema.end() && value.get<std::string>().size() < it->get<std::size_t>())
            out.push_back(path + ": string shorter than minLength " + it->dump());
    }

    if (value.is_object()) {
        const json empty = json::object();
        const json& props = schema.contains("properties") ? schema["properties"] : empty;
        if (auto it = schema.find("required"); it != schema.end())
            for (const auto& key : *it)
                if (!value.contains(key.get<std::string>()))
                    out.push_back(path + ": missing required property \"" +
                                  key.get<std::string>() + "\"");
        for (auto it = value.begin(); it != value.end(); ++it) {
            const std::string child = path + "." + it.key();
            if (auto p = props.find(it.key()); p != props.end()) {
                walk(*p, it.value(), child, out);
            } else if (auto ap = schema.find("additionalProperties"); ap != schema.end()) {
                if (ap->is_boolean() && !ap->get<bool>())
                    out.push_back(child + ": property not allowed");
                else if (ap->is_object())
                    walk(*ap, it.value(), child, out);
            }
        }
    }

    if (value.is_array()) {
        if (auto it = schema.find("minItems");
            it != schema.end() && value.size() < it->get<std::size_t>())
            out.push_back(path + ": fewer than " + it->dump() + " items");
        if (auto it = schema.find("maxItems");
            it != schema.end() && value.size() > it->get<std::size_t>())
            out.push_back(path + ": more than " + it->dump() + " items");
        if (auto it = schema.find("items"); it != schema.end())
            for (std::size_t i = 0; i < value.size(); ++i)
                walk(*it, value[i], path + "[" + std::to_string(i) + "]", out);
    }
}

} // namespace

std::vector<std::string> schema_violations(const nlohmann::json& schema,
                                           const nlohmann::json& value) {
    std::vector<std::string> out;
    walk(schema, value, "$", out);
    return out;
}

} // namespace drs
