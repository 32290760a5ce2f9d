#include "drs/errors.hpp"
#include "drs/sdd.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace drs;
using namespace drs::test;

namespace {

std::string prompt_text(const ChatRequest& request) {
    std::string text;
    for (const auto& part : request.user_parts)
        if (part.kind == UserPart::Kind::text) text += part.text + "\n";
    return text;
}

} // namespace

TEST_CASE("description prompts ground elements in pixel boxes when layout is known") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    const auto request = render_description_prompt(design);

    REQUIRE_FALSE(request.user_parts.empty());
    // The rendition always travels with the prompt.
    const bool has_image =
        std::any_of(request.user_parts.begin(), request.user_parts.end(),
                    [](const UserPart& p) { return p.kind == UserPart::Kind::image; });
    CHECK(has_image);

    const auto text = prompt_text(request);
    CHECK(text.find("flyer-title") != std::string::npos);
    CHECK(text.find("bbox=(10, 5, 90, 20)") != std::string::npos);
    CHECK(text.find("Summer Sale") != std::string::npos);
    CHECK(text.find("[text]") != std::string::npos);
}

TEST_CASE("description prompts fall back to raster-only wording without layout") {
    TempDir dir;
    const Design design =
        load_design(write_design(dir, "bare", textured_image(30, 20, 3), {}));
    const auto request = render_description_prompt(design);

    const auto text = prompt_text(request);
    CHECK(text.find("bbox=") == std::string::npos);
    // The model is asked to identify regions itself instead.
    CHECK(text.find("Identify") != std::string::npos);
}

TEST_CASE("descriptions parse, clean and render deterministically") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));

    DesignDescription desc = description_from_json(
        {{"overview", "A flyer."},
         {"elements",
          {{{"element_id", "flyer-title"}, {"text", "Bold heading."}},
           {{"element_id", "ghost"}, {"text", "Note about nothing."}},
           {{"text", "Untied note."}}}},
         {"hierarchy", "Title first."}});
    REQUIRE(desc.element_notes.size() == 3);

    std::vector<std::string> warnings;
    desc = clean_description(std::move(desc), design, &warnings);
    REQUIRE(desc.element_notes.size() == 2);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("ghost") != std::string::npos);

    // Idempotent: a second pass changes nothing.
    std::vector<std::string> again;
    desc = clean_description(std::move(desc), design, &again);
    CHECK(again.empty());
    CHECK(desc.element_notes.size() == 2);

    const auto text = desc.to_text();
    CHECK(text.find("Overview: A flyer.") != std::string::npos);
    CHECK(text.find("[flyer-title] Bold heading.") != std::string::npos);
    CHECK(text.find("Untied note.") != std::string::npos);
    CHECK(text == desc.to_text());
}

TEST_CASE("generate_description wires prompt, schema and cleanup together") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));

    MockChatClient client(nlohmann::json::array({any_reply(description_reply(
        "A crisp flyer.", {{"flyer-photo", "Photo sits mid-canvas."},
                           {"nowhere", "Dropped note."}}))}));
    std::vector<std::string> warnings;
    const auto desc = generate_description(design, client, SddTemplates::defaults(),
                                           &warnings);
    CHECK(desc.overview == "A crisp flyer.");
    REQUIRE(desc.element_notes.size() == 1);
    CHECK(desc.element_notes[0].element_id.value() == "flyer-photo");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("nowhere") != std::string::npos);

    // The request carried the schema, so malformed replies would have
    // been repaired or rejected.
    REQUIRE(client.requests().size() == 1);
    CHECK_FALSE(client.requests()[0].response_schema.empty());
}

TEST_CASE("a reply that never fits the description schema surfaces as SchemaError") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    MockChatClient client(
        nlohmann::json::array({any_reply({{"overview", ""}})}));
    CHECK_THROWS_AS(generate_description(design, client), SchemaError);
}
