#pragma once

#include "drs/image.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace drs {

// Axis-aligned box in canvas coordinates, x_min < x_max, y_min < y_max.
struct BBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double center_x() const { return 0.5 * (x_min + x_max); }
    double center_y() const { return 0.5 * (y_min + y_max); }
};

enum class ElementKind { text, image, shape, icon, other };

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& s);

struct Element {
    std::string id;
    ElementKind kind = ElementKind::other;
    BBox bbox;
    std::optional<std::string> text_content; // required non-empty for kind=text
};

enum class DesignRole { query, library };

// One design under review: a rendered raster plus an optional machine
// readable layout.  An absent layout and an empty element list are the
// same state: elements is empty exactly when no layout is known.
struct Design {
    std::string id;
    std::filesystem::path rendition_path;
    int canvas_w = 0;
    int canvas_h = 0;
    std::vector<Element> elements;
    DesignRole role = DesignRole::query;

    bool has_layout() const { return !elements.empty(); }
    const Element* find_element(const std::string& element_id) const;

    // Throws ValidationError naming the offending element on any
    // violated structural rule.
    void validate() const;
};

// --- world attribute registry ---------------------------------------------

enum class RatingKind { binary, scale_1_10 };

struct WorldAttribute {
    std::string key;          // stable snake_case identifier
    std::string display_name; // short human label for prompts
    std::string description;  // one-paragraph reviewer guidance
    RatingKind default_kind = RatingKind::binary;
};

// The fixed vocabulary of review dimensions.  Order is stable and part
// of the public contract.
const std::vector<WorldAttribute>& world_attributes();
bool is_world_attribute(const std::string& key);
const WorldAttribute& attribute_by_key(const std::string& key); // throws ValidationError

// --- descriptor I/O --------------------------------------------------------

// JSON shape:
//   { "id": str, "rendition": str, "canvas": {"w": int, "h": int},
//     "elements": [ {"id", "kind", "bbox": [x0,y0,x1,y1], "text"? } ]? }
// Relative rendition paths resolve against base_dir.
Design design_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
nlohmann::json design_to_json(const Design& design, const std::filesystem::path& base_dir);

Design load_design(const std::filesystem::path& descriptor_path);
void save_design(const Design& design, const std::filesystem::path& descriptor_path);

// Cuts the element's bbox out of the rendition.  Boxes live in canvas
// coordinates; when the decoded raster has a different resolution the
// box scales proportionally.  Degenerate after rounding (< 1px) is an
// error naming the element.
Image crop_element(const Image& rendition, const Design& design, const Element& element);
Image crop_element(const Design& design, const Element& element);

// An ordered pool of candidate reference designs.
struct DesignLibrary {
    std::vector<Design> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

// Loads { "designs": [descriptor_path, ...] }; relative paths resolve
// against the library file's directory.  Duplicate design ids are an
// error.
DesignLibrary load_library(const std::filesystem::path& library_path);

} // namespace drs
