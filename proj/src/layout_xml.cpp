#include "drs/layout_xml.hpp"

#include "drs/errors.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <string>

namespace drs {

namespace {

namespace pt = boost::property_tree;

std::string require_attr(const pt::ptree& node, const std::string& name,
                         const std::string& where) {
    auto value = node.get_optional<std::string>("<xmlattr>." + name);
    if (!value)
        throw ValidationError(where + ": missing attribute \"" + name + "\"");
    return *value;
}

double require_number_attr(const pt::ptree& node, const std::string& name,
                           const std::string& where) {
    const std::string raw = require_attr(node, name, where);
    try {
        std::size_t used = 0;
        const double value = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return value;
    } catch (const std::exception&) {
        throw ValidationError(where + ": attribute \"" + name +
                              "\" is not a number: \"" + raw + "\"");
    }
}

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

nlohmann::json layout_xml_to_descriptor(const std::filesystem::path& xml_path) {
    pt::ptree tree;
    try {
        pt::read_xml(xml_path.string(), tree);
    } catch (const pt::xml_parser_error& e) {
        throw ValidationError("cannot parse layout XML " + xml_path.string() + ": " +
                              e.what());
    }

    auto design = tree.get_child_optional("design");
    if (!design)
        throw ValidationError(xml_path.string() + ": missing <design> root element");

    nlohmann::json doc;
    doc["id"] = require_attr(*design, "id", "<design>");
    doc["rendition"] = require_attr(*design, "rendition", "<design>");
    doc["canvas"] = {
        {"w", static_cast<int>(require_number_attr(*design, "width", "<design>"))},
        {"h", static_cast<int>(require_number_attr(*design, "height", "<design>"))}};

    nlohmann::json elements = nlohmann::json::array();
    for (const auto& [name, node] : *design) {
        if (name != "element") continue;
        const auto id = node.get_optional<std::string>("<xmlattr>.id");
        const std::string where =
            "<element" + (id ? " id=\"" + *id + "\"" : " without id") + ">";
        if (!id)
            throw ValidationError(where + ": missing attribute \"id\"");
        nlohmann::json ej;
        ej["id"] = *id;
        ej["kind"] = require_attr(node, "kind", where);
        ej["bbox"] = {require_number_attr(node, "x_min", where),
                      require_number_attr(node, "y_min", where),
                      require_number_attr(node, "x_max", where),
                      require_number_attr(node, "y_max", where)};
        const std::string text = trimmed(node.get_value<std::string>());
        if (!text.empty()) ej["text"] = text;
        elements.push_back(std::move(ej));
    }
    if (!elements.empty()) doc["elements"] = std::move(elements);
    return doc;
}

} // namespace drs
