#include "drs/design.hpp"

#include "drs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace drs {

namespace {

const char* kind_names[] = {"text", "image", "shape", "icon", "other"};

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return doc;
}

const nlohmann::json& require_field(const nlohmann::json& doc, const char* key,
                                    const std::string& where) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw ValidationError(where + ": missing required field \"" + key + "\"");
    return *it;
}

std::string require_string(const nlohmann::json& doc, const char* key,
                           const std::string& where) {
    const auto& v = require_field(doc, key, where);
    if (!v.is_string())
        throw ValidationError(where + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

int require_positive_int(const nlohmann::json& doc, const char* key,
                         const std::string& where) {
    const auto& v = require_field(doc, key, where);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ValidationError(where + ": field \"" + key + "\" must be a positive integer");
    return v.get<int>();
}

} // namespace

std::string to_string(ElementKind kind) {
    return kind_names[static_cast<int>(kind)];
}

ElementKind element_kind_from_string(const std::string& s) {
    for (int i = 0; i < 5; ++i)
        if (s == kind_names[i]) return static_cast<ElementKind>(i);
    throw ValidationError("unknown element kind \"" + s +
                          "\" (expected text, image, shape, icon or other)");
}

const Element* Design::find_element(const std::string& element_id) const {
    for (const auto& e : elements)
        if (e.id == element_id) return &e;
    return nullptr;
}

void Design::validate() const {
    if (id.empty())
        throw ValidationError("design id must be non-empty");
    if (canvas_w <= 0 || canvas_h <= 0)
        throw ValidationError("design \"" + id + "\": canvas dimensions must be positive");
    if (rendition_path.empty())
        throw ValidationError("design \"" + id + "\": rendition path must be non-empty");

    std::set<std::string> seen;
    for (const auto& e : elements) {
        const std::string where = "design \"" + id + "\", element \"" + e.id + "\"";
        if (e.id.empty())
            throw ValidationError("design \"" + id + "\": element id must be non-empty");
        if (!seen.insert(e.id).second)
            throw ValidationError("design \"" + id + "\": duplicate element id \"" + e.id + "\"");
        const BBox& b = e.bbox;
        if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max))
            throw ValidationError(where + ": bbox must have positive extent");
        if (b.x_min < 0 || b.y_min < 0 || b.x_max > canvas_w || b.y_max > canvas_h)
            throw ValidationError(where + ": bbox exceeds the canvas");
        if (e.kind == ElementKind::text &&
            (!e.text_content || e.text_content->empty()))
            throw ValidationError(where + ": text elements need non-empty text content");
    }
}

// --- world attribute registry ----------------------------------------------

const std::vector<WorldAttribute>& world_attributes() {
    static const std::vector<WorldAttribute> registry = {
        {"text_rendering_quality", "Text rendering quality",
         "Whether every piece of text is rendered cleanly: no clipped, blurred, "
         "garbled or overlapping glyphs, and no obvious rasterization artifacts.",
         RatingKind::binary},
        {"too_many_words", "Word count",
         "Whether the design carries more copy than its format can support, "
         "crowding the canvas and making the message hard to scan.",
         RatingKind::binary},
        {"too_many_fonts", "Font variety",
         "Whether the number of distinct typefaces or weights is large enough "
         "to feel inconsistent rather than deliberate.",
         RatingKind::binary},
        {"bad_typography_colors", "Typography colors",
         "Whether any text color fights its background: weak contrast, "
         "vibrating hue pairs, or text that disappears into imagery.",
         RatingKind::binary},
        {"composition_and_layout", "Composition and layout",
         "How well the overall arrangement works: balance of visual weight, "
         "a clear focal point, and a sensible reading order across the canvas.",
         RatingKind::binary},
        {"alignment", "Alignment",
         "Whether element edges and centers line up along consistent axes "
         "instead of sitting a few pixels off a shared grid.",
         RatingKind::binary},
        {"spacing", "Spacing",
         "Whether margins and gaps are sized consistently, leaving breathing "
         "room without stranding large dead areas.",
         RatingKind::binary},
        {"color_harmony", "Color harmony",
         "Whether the palette reads as one deliberate scheme, with hues and "
         "saturations that sit comfortably together.",
         RatingKind::binary},
        {"wrong_color_palettes", "Palette fit",
         "Whether the chosen palette suits the subject and tone of the piece, "
         "rather than clashing with its content or brand.",
         RatingKind::binary},
        {"style", "Style consistency",
         "Whether graphic treatments (illustration style, iconography, photo "
         "filters, corner radii) stay coherent across the design.",
         RatingKind::binary},
        {"grouping", "Grouping",
         "Whether related items sit close enough to read as units and "
         "unrelated items are clearly separated.",
         RatingKind::binary},
        {"image_text_alignment", "Image-text fit",
         "Whether text blocks and imagery are placed in sensible relation to "
         "each other: captions near their pictures, no text stranded over "
         "busy regions.",
         RatingKind::binary},
        {"aesthetics", "Aesthetics",
         "The overall visual appeal of the piece, taken as a whole rather "
         "than as a checklist of individual faults.",
         RatingKind::binary},
        {"overlap", "Overlap",
         "Whether elements occlude each other unintentionally, hiding content "
         "or creating accidental collisions.",
         RatingKind::binary},
        {"bad_images", "Image quality",
         "Whether any placed image is low-resolution, stretched, pixelated or "
         "otherwise visibly degraded.",
         RatingKind::binary},
    };
    return registry;
}

bool is_world_attribute(const std::string& key) {
    const auto& reg = world_attributes();
    return std::any_of(reg.begin(), reg.end(),
                       [&](const WorldAttribute& a) { return a.key == key; });
}

const WorldAttribute& attribute_by_key(const std::string& key) {
    for (const auto& a : world_attributes())
        if (a.key == key) return a;
    throw ValidationError("unknown attribute key \"" + key + "\"");
}

// --- descriptor I/O ---------------------------------------------------------

Design design_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object())
        throw ValidationError("design descriptor must be a JSON object");

    Design d;
    d.id = require_string(doc, "id", "design descriptor");
    const std::string where = "design \"" + d.id + "\"";

    std::filesystem::path rendition = require_string(doc, "rendition", where);
    d.rendition_path = rendition.is_absolute() ? rendition : base_dir / rendition;

    const auto& canvas = require_field(doc, "canvas", where);
    if (!canvas.is_object())
        throw ValidationError(where + ": \"canvas\" must be an object");
    d.canvas_w = require_positive_int(canvas, "w", where + " canvas");
    d.canvas_h = require_positive_int(canvas, "h", where + " canvas");

    if (auto it = doc.find("elements"); it != doc.end()) {
        if (!it->is_array())
            throw ValidationError(where + ": \"elements\" must be an array");
        for (const auto& elem : *it) {
            if (!elem.is_object())
                throw ValidationError(where + ": each element must be an object");
            Element e;
            e.id = require_string(elem, "id", where + " element");
            const std::string ewhere = where + ", element \"" + e.id + "\"";
            e.kind = element_kind_from_string(require_string(elem, "kind", ewhere));
            const auto& bbox = require_field(elem, "bbox", ewhere);
            if (!bbox.is_array() || bbox.size() != 4 ||
                !std::all_of(bbox.begin(), bbox.end(),
                             [](const nlohmann::json& v) { return v.is_number(); }))
                throw ValidationError(ewhere + ": bbox must be [x_min, y_min, x_max, y_max]");
            e.bbox = {bbox[0].get<double>(), bbox[1].get<double>(),
                      bbox[2].get<double>(), bbox[3].get<double>()};
            if (auto t = elem.find("text"); t != elem.end()) {
                if (!t->is_string())
                    throw ValidationError(ewhere + ": \"text\" must be a string");
                e.text_content = t->get<std::string>();
            }
            d.elements.push_back(std::move(e));
        }
    }
    d.validate();
    return d;
}

nlohmann::json design_to_json(const Design& design, const std::filesystem::path& base_dir) {
    design.validate();
    nlohmann::json doc;
    doc["id"] = design.id;
    std::error_code ec;
    auto rel = std::filesystem::relative(design.rendition_path, base_dir, ec);
    doc["rendition"] = (ec || rel.empty()) ? design.rendition_path.string() : rel.string();
    doc["canvas"] = {{"w", design.canvas_w}, {"h", design.canvas_h}};
    if (!design.elements.empty()) {
        auto& elems = doc["elements"] = nlohmann::json::array();
        for (const auto& e : design.elements) {
            nlohmann::json ej;
            ej["id"] = e.id;
            ej["kind"] = to_string(e.kind);
            ej["bbox"] = {e.bbox.x_min, e.bbox.y_min, e.bbox.x_max, e.bbox.y_max};
            if (e.text_content) ej["text"] = *e.text_content;
            elems.push_back(std::move(ej));
        }
    }
    return doc;
}

Design load_design(const std::filesystem::path& descriptor_path) {
    const auto doc = load_json_file(descriptor_path);
    auto base = descriptor_path.parent_path();
    if (base.empty()) base = ".";
    return design_from_json(doc, base);
}

void save_design(const Design& design, const std::filesystem::path& descriptor_path) {
    auto base = descriptor_path.parent_path();
    if (base.empty()) base = ".";
    const auto doc = design_to_json(design, base);
    std::ofstream out(descriptor_path);
    if (!out)
        throw ValidationError("cannot write " + descriptor_path.string());
    out << doc.dump(2) << "\n";
}

Image crop_element(const Image& rendition, const Design& design, const Element& element) {
    const double sx = static_cast<double>(rendition.width) / design.canvas_w;
    const double sy = static_cast<double>(rendition.height) / design.canvas_h;
    int x0 = static_cast<int>(std::llround(element.bbox.x_min * sx));
    int y0 = static_cast<int>(std::llround(element.bbox.y_min * sy));
    int x1 = static_cast<int>(std::llround(element.bbox.x_max * sx));
    int y1 = static_cast<int>(std::llround(element.bbox.y_max * sy));
    x0 = std::clamp(x0, 0, rendition.width);
    y0 = std::clamp(y0, 0, rendition.height);
    x1 = std::clamp(x1, 0, rendition.width);
    y1 = std::clamp(y1, 0, rendition.height);
    if (x0 >= x1 || y0 >= y1)
        throw ValidationError("design \"" + design.id + "\", element \"" + element.id +
                              "\": bbox collapses below one pixel in the rendition");
    return crop(rendition, x0, y0, x1, y1);
}

Image crop_element(const Design& design, const Element& element) {
    return crop_element(load_image(design.rendition_path), design, element);
}

DesignLibrary load_library(const std::filesystem::path& library_path) {
    const auto doc = load_json_file(library_path);
    if (!doc.is_object())
        throw ValidationError("library file must be a JSON object");
    const auto& designs = require_field(doc, "designs", "library " + library_path.string());
    if (!designs.is_array())
        throw ValidationError("library \"designs\" must be an array of descriptor paths");

    auto base = library_path.parent_path();
    if (base.empty()) base = ".";

    DesignLibrary lib;
    std::set<std::string> ids;
    for (const auto& entry : designs) {
        if (!entry.is_string())
            throw ValidationError("library \"designs\" entries must be strings");
        std::filesystem::path p = entry.get<std::string>();
        Design d = load_design(p.is_absolute() ? p : base / p);
        d.role = DesignRole::library;
        if (!ids.insert(d.id).second)
            throw ValidationError("library contains duplicate design id \"" + d.id + "\"");
        lib.entries.push_back(std::move(d));
    }
    return lib;
}

} // namespace drs
