#include "drs/errors.hpp"
#include "drs/review.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

using namespace drs;
using namespace drs::test;

namespace {

DesignDescription stub_description() {
    DesignDescription d;
    d.overview = "A flyer.";
    d.hierarchy = "Title first.";
    return d;
}

} // namespace

TEST_CASE("profiles expose their rating vocabulary") {
    const auto full = DatasetProfile::by_name("full");
    CHECK(full.attributes.size() == 15);
    CHECK(full.kind_of("alignment") == RatingKind::binary);

    const auto afixa = DatasetProfile::by_name("afixa");
    CHECK(afixa.attributes.size() == 5);

    const auto gde = DatasetProfile::by_name("gde");
    CHECK(gde.attributes.size() == 3);
    CHECK(gde.kind_of("spacing") == RatingKind::scale_1_10);
    // Corpus-specific label names map onto the registry.
    CHECK(gde.label_aliases.at("white_space") == "spacing");

    CHECK_THROWS_AS(DatasetProfile::by_name("nonsense"), ValidationError);
    CHECK_THROWS_AS(gde.kind_of("style"), ValidationError);
}

TEST_CASE("the default static buckets cover exactly the universal concerns") {
    const auto buckets = default_static_buckets();
    REQUIRE(buckets.size() == 3);
    CHECK(buckets[0].agent_name == "typography");
    CHECK(buckets[1].agent_name == "layout");
    CHECK(buckets[2].agent_name == "color");
    std::size_t covered = 0;
    for (const auto& b : buckets) covered += b.attributes.size();
    CHECK(covered == 10);
}

TEST_CASE("plans reject overlapping or unknown attributes") {
    ReviewPlan plan;
    plan.static_buckets = default_static_buckets();

    SUBCASE("well-formed") { CHECK_NOTHROW(plan.validate()); }
    SUBCASE("attribute claimed twice") {
        plan.dynamic_buckets.push_back(
            {"extra", AgentKind::dynamic, {"alignment"}});
        CHECK_THROWS_AS(plan.validate(), ValidationError);
    }
    SUBCASE("unknown attribute") {
        plan.dynamic_buckets.push_back({"extra", AgentKind::dynamic, {"kerning"}});
        CHECK_THROWS_AS(plan.validate(), ValidationError);
    }
    SUBCASE("duplicate reviewer names") {
        plan.dynamic_buckets.push_back(
            {"typography", AgentKind::dynamic, {"style"}});
        CHECK_THROWS_AS(plan.validate(), ValidationError);
    }
    SUBCASE("empty bucket") {
        plan.dynamic_buckets.push_back({"extra", AgentKind::dynamic, {}});
        CHECK_THROWS_AS(plan.validate(), ValidationError);
    }
}

TEST_CASE("the planner's buckets are cleaned before adoption") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    ReviewConfig cfg;

    // The reply claims a covered attribute, an unknown one, a repeat,
    // and a name already taken by a static reviewer.
    MockChatClient client(nlohmann::json::array({any_reply(
        {{"buckets",
          {{{"name", "typography"}, {"attributes", {"style", "alignment", "kerning"}}},
           {{"name", "imagery"}, {"attributes", {"style", "bad_images"}}},
           {{"name", "husk"}, {"attributes", {"spacing"}}}}},
         {"rationale", "spread the rest"}})}));

    std::vector<std::string> warnings;
    const auto plan = plan_review(design, stub_description(), cfg, client, nullptr,
                                  &warnings);
    REQUIRE(plan.dynamic_buckets.size() == 2);
    // First bucket kept "style" only, renamed to avoid the clash.
    CHECK(plan.dynamic_buckets[0].agent_name == "typography_2");
    CHECK(plan.dynamic_buckets[0].attributes ==
          std::vector<std::string>{"style"});
    // Second kept bad_images; the husk bucket lost its only (covered)
    // attribute and was dropped.
    CHECK(plan.dynamic_buckets[1].attributes ==
          std::vector<std::string>{"bad_images"});
    // covered, unknown, repeated, covered again, emptied bucket.
    CHECK(warnings.size() == 5);
    CHECK_NOTHROW(plan.validate());
}

TEST_CASE("an unusable planner reply degrades to a single catch-all bucket") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    ReviewConfig cfg;
    MockChatClient client(nlohmann::json::array({any_reply("not json at all {")}));

    std::vector<std::string> warnings;
    const auto plan = plan_review(design, stub_description(), cfg, client, nullptr,
                                  &warnings);
    REQUIRE(plan.dynamic_buckets.size() == 1);
    CHECK(plan.dynamic_buckets[0].agent_name == "dynamic_review");
    // The catch-all holds the whole uncovered remainder of the profile.
    CHECK(plan.dynamic_buckets[0].attributes ==
          std::vector<std::string>{"style", "grouping", "image_text_alignment",
                                   "aesthetics", "bad_images"});
    REQUIRE_FALSE(warnings.empty());
    CHECK(warnings[0].find("planner output unusable") != std::string::npos);
}

TEST_CASE("a fully covered profile skips the planner call") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    ReviewConfig cfg;
    cfg.profile = DatasetProfile::by_name("gde"); // alignment, overlap, spacing
    MockChatClient client(nlohmann::json::array()); // would fail if consulted

    const auto plan = plan_review(design, stub_description(), cfg, client);
    CHECK(plan.dynamic_buckets.empty());
    REQUIRE(plan.static_buckets.size() == 1); // only "layout" survives the profile
    CHECK(plan.static_buckets[0].attributes ==
          std::vector<std::string>{"alignment", "spacing", "overlap"});
    CHECK(client.calls() == -1);
}

TEST_CASE("reviewers rate their bucket and nothing else") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    ReviewConfig cfg;
    cfg.profile = DatasetProfile::by_name("gde");
    const AttributeBucket bucket{"layout", AgentKind::fixed,
                                 {"alignment", "spacing", "overlap"}};

    nlohmann::json ratings = {{"alignment", 7.0},
                              {"spacing", 12.5},   // clamps to 10
                              {"overlap", 3.0},
                              {"style", 5.0}};     // stray key, dropped
    nlohmann::json feedback = nlohmann::json::array(
        {feedback_item("spacing", "Margins collapse near the footer.", "major"),
         feedback_item("aesthetics", "Not this reviewer's concern.", "minor")});
    MockChatClient client(
        nlohmann::json::array({any_reply(verdict_reply(ratings, feedback))}));

    std::vector<std::string> warnings;
    const auto verdict =
        review_bucket(design, stub_description(), {}, bucket, cfg, client, &warnings);

    REQUIRE(verdict.ratings.size() == 3);
    CHECK(std::get<double>(verdict.ratings.at("spacing")) == 10.0);
    CHECK(std::get<double>(verdict.ratings.at("alignment")) == 7.0);
    REQUIRE(verdict.feedback.size() == 1);
    CHECK(verdict.feedback[0].attribute == "spacing");
    CHECK(verdict.feedback[0].agents == std::vector<std::string>{"layout"});
    CHECK(warnings.size() == 3); // clamp + stray rating + stray feedback
}

TEST_CASE("reviewer prompts carry the design, description and references") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer", 1));
    const Design exemplar = load_design(write_sample_design(dir, "fine-work", 2));
    ReviewConfig cfg;
    const AttributeBucket bucket{"color", AgentKind::fixed,
                                 {"color_harmony", "wrong_color_palettes"}};
    MockChatClient client(nlohmann::json::array({any_reply(
        verdict_reply(clean_ratings({"color_harmony", "wrong_color_palettes"})))}));

    review_bucket(design, stub_description(), {exemplar}, bucket, cfg, client);

    REQUIRE(client.requests().size() == 1);
    const auto& request = client.requests()[0];
    int images = 0;
    bool names_exemplar = false;
    for (const auto& part : request.user_parts) {
        if (part.kind == UserPart::Kind::image) ++images;
        if (part.kind == UserPart::Kind::text &&
            part.text.find("fine-work") != std::string::npos)
            names_exemplar = true;
    }
    CHECK(images == 2); // the design plus one reference
    CHECK(names_exemplar);
    CHECK(request.system_prompt.find("Color") != std::string::npos);
}

TEST_CASE("summaries merge verdicts, dedup feedback and survive summary failure") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    MockEmbeddingProvider embedder(16, 0);
    ReviewConfig cfg;
    cfg.profile = DatasetProfile::by_name("gde");
    cfg.static_buckets = {{"layout_a", AgentKind::fixed, {"alignment", "spacing"}},
                          {"layout_b", AgentKind::fixed, {"overlap"}}};
    cfg.max_dynamic_buckets = 0;

    ReviewPlan plan;
    plan.static_buckets = cfg.static_buckets;
    plan.rationale = "split for the test";

    AgentVerdict a;
    a.agent_name = "layout_a";
    a.ratings = {{"alignment", 6.0}, {"spacing", 5.0}};
    a.feedback.push_back(
        {"spacing", "Row gaps are uneven.", Severity::minor, {"layout_a"}});
    AgentVerdict b;
    b.agent_name = "layout_b";
    b.ratings = {{"overlap", 9.0}};
    // Same attribute, identical wording: must fold into one item and
    // take the higher severity.
    b.feedback.push_back(
        {"spacing", "Row gaps are uneven.", Severity::critical, {"layout_b"}});

    SUBCASE("happy path with dedup") {
        MockChatClient client(nlohmann::json::array(
            {any_reply({{"summary", "Tighten the grid."}})}));
        const auto report =
            summarize_review(design, {a, b}, plan, cfg, client, embedder);
        CHECK(report.summary == "Tighten the grid.");
        CHECK(report.ratings.size() == 3);
        REQUIRE(report.feedback.size() == 1);
        CHECK(report.feedback[0].severity == Severity::critical);
        CHECK(report.feedback[0].agents ==
              std::vector<std::string>{"layout_a", "layout_b"});
    }
    SUBCASE("summary failure is non-fatal") {
        MockChatClient client(nlohmann::json::array()); // no reply scripted
        std::vector<std::string> warnings;
        const auto report = summarize_review(design, {a, b}, plan, cfg, client,
                                             embedder, nullptr, &warnings);
        CHECK(report.summary.empty());
        REQUIRE_FALSE(warnings.empty());
        CHECK(warnings.back().find("summary generation failed") != std::string::npos);
    }
    SUBCASE("verdicts must match the plan one-to-one") {
        MockChatClient client(nlohmann::json::array(
            {any_reply({{"summary", "irrelevant"}})}));
        CHECK_THROWS_AS(summarize_review(design, {a}, plan, cfg, client, embedder),
                        ValidationError);
        CHECK_THROWS_AS(summarize_review(design, {a, a}, plan, cfg, client, embedder),
                        ValidationError);
    }
}
