#pragma once

#include "drs/chat.hpp"
#include "drs/design.hpp"

#include <optional>
#include <string>
#include <vector>

namespace drs {

// A model-written note about one part of the design; element_id is set
// when the design exposed a layout and the model tied the note to a
// listed element.
struct ElementNote {
    std::optional<std::string> element_id;
    std::string text;
};

// Structured summary of a design, generated before any review so every
// reviewer works from the same reading of the canvas.
struct DesignDescription {
    std::string overview;
    std::vector<ElementNote> element_notes;
    std::string hierarchy;

    // Deterministic plain-text rendering for downstream prompts.
    std::string to_text() const;
    nlohmann::json to_json() const;
};

// Prompt wording, overridable from config.
struct SddTemplates {
    std::string system;
    std::string layout_header;   // used when elements are known
    std::string nolayout_header; // used when the raster is all we have

    static SddTemplates defaults();
};

nlohmann::json design_description_schema();

// Builds the description request: the rendition image plus either a
// per-element inventory (ids, kinds, integer pixel boxes, text
// content) or, without a layout, instructions to identify the regions
// from the raster alone.
ChatRequest render_description_prompt(const Design& design,
                                      const SddTemplates& templates = SddTemplates::defaults());

DesignDescription description_from_json(const nlohmann::json& doc);

// Drops notes pointing at element ids the design does not contain,
// appending one warning per dropped note.  Applying it twice changes
// nothing.
DesignDescription clean_description(DesignDescription desc, const Design& design,
                                    std::vector<std::string>* warnings);

DesignDescription generate_description(const Design& design, ChatClient& client,
                                       const SddTemplates& templates = SddTemplates::defaults(),
                                       std::vector<std::string>* warnings = nullptr);

} // namespace drs
