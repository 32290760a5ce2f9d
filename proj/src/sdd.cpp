#include "drs/sdd.hpp"

#include "drs/errors.hpp"
#include "drs/image.hpp"

#include <cmath>
#include <sstream>

namespace drs {

namespace {

long long px(double v) { return std::llround(v); }

} // namespace

std::string DesignDescription::to_text() const {
    std::ostringstream out;
    out << "Overview: " << overview << "\n";
    if (!element_notes.empty()) {
        out << "Elements:\n";
        for (const auto& note : element_notes) {
            out << "- ";
            if (note.element_id) out << "[" << *note.element_id << "] ";
            out << note.text << "\n";
        }
    }
    out << "Hierarchy: " << hierarchy << "\n";
    return out.str();
}

nlohmann::json DesignDescription::to_json() const {
    nlohmann::json doc;
    doc["overview"] = overview;
    doc["elements"] = nlohmann::json::array();
    for (const auto& note : element_notes) {
        nlohmann::json nj;
        if (note.element_id) nj["element_id"] = *note.element_id;
        nj["text"] = note.text;
        doc["elements"].push_back(std::move(nj));
    }
    doc["hierarchy"] = hierarchy;
    return doc;
}

SddTemplates SddTemplates::defaults() {
    SddTemplates t;
    t.system =
        "You are a meticulous graphic design analyst. Study the attached design "
        "and produce a structured description of it. Answer with JSON only, "
        "using keys overview, elements and hierarchy.";
    t.layout_header =
        "The design exposes the following elements (id, kind, pixel bounding box "
        "x_min,y_min,x_max,y_max, and text where applicable). Describe the role "
        "and visual treatment of each element, referencing elements by id:";
    t.nolayout_header =
        "No machine-readable layout is available. Identify the distinct visual "
        "regions of the design yourself and describe each one.";
    return t;
}

nlohmann::json design_description_schema() {
    return {
        {"type", "object"},
        {"required", {"overview", "elements", "hierarchy"}},
        {"additionalProperties", false},
        {"properties",
         {{"overview", {{"type", "string"}, {"minLength", 1}}},
          {"hierarchy", {{"type", "string"}}},
          {"elements",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"required", {"text"}},
              {"additionalProperties", false},
              {"properties",
               {{"element_id", {{"type", "string"}}},
                {"text", {{"type", "string"}, {"minLength", 1}}}}}}}}}}},
    };
}

ChatRequest render_description_prompt(const Design& design,
                                      const SddTemplates& templates) {
    design.validate();

    ChatRequest request;
    request.system_prompt = templates.system;
    request.response_schema = design_description_schema();

    auto bytes = read_file_bytes(design.rendition_path);
    auto mime = sniff_image_mime(bytes);
    request.user_parts.push_back(UserPart::make_image(std::move(bytes), std::move(mime)));

    std::ostringstream text;
    if (design.has_layout()) {
        text << templates.layout_header << "\n";
        for (const auto& e : design.elements) {
            text << "- " << e.id << " [" << to_string(e.kind) << "] bbox=("
                 << px(e.bbox.x_min) << ", " << px(e.bbox.y_min) << ", "
                 << px(e.bbox.x_max) << ", " << px(e.bbox.y_max) << ")";
            if (e.text_content) text << " text=\"" << *e.text_content << "\"";
            text << "\n";
        }
        text << "Then explain how the elements relate: reading order, grouping "
                "and visual hierarchy.";
    } else {
        text << templates.nolayout_header << "\n"
             << "Then explain how the regions relate: reading order, grouping "
                "and visual hierarchy.";
    }
    request.user_parts.push_back(UserPart::make_text(text.str()));
    return request;
}

DesignDescription description_from_json(const nlohmann::json& doc) {
    DesignDescription desc;
    desc.overview = doc.at("overview").get<std::string>();
    desc.hierarchy = doc.at("hierarchy").get<std::string>();
    for (const auto& item : doc.at("elements")) {
        ElementNote note;
        if (item.contains("element_id"))
            note.element_id = item["element_id"].get<std::string>();
        note.text = item.at("text").get<std::string>();
        desc.element_notes.push_back(std::move(note));
    }
    return desc;
}

DesignDescription clean_description(DesignDescription desc, const Design& design,
                                    std::vector<std::string>* warnings) {
    std::vector<ElementNote> kept;
    kept.reserve(desc.element_notes.size());
    for (auto& note : desc.element_notes) {
        if (note.element_id && !design.find_element(*note.element_id)) {
            if (warnings)
                warnings->push_back("description referenced unknown element \"" +
                                    *note.element_id + "\"; note dropped");
            continue;
        }
        kept.push_back(std::move(note));
    }
    desc.element_notes = std::move(kept);
    return desc;
}

DesignDescription generate_description(const Design& design, ChatClient& client,
                                       const SddTemplates& templates,
                                       std::vector<std::string>* warnings) {
    const auto request = render_description_prompt(design, templates);
    const auto response = client.complete(request);
    return clean_description(description_from_json(response.parsed), design, warnings);
}

} // namespace drs
