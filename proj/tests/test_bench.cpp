#include "drs/bench.hpp"
#include "drs/errors.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace drs;
using namespace drs::test;

namespace {

std::string write_lines(const TempDir& dir, const std::string& name,
                        const std::vector<nlohmann::json>& lines) {
    const auto path = dir.file(name);
    std::ofstream out(path);
    for (const auto& line : lines) out << line.dump() << "\n";
    return path;
}

} // namespace

TEST_CASE("datasets load with label aliases and problem sentences") {
    TempDir dir;
    write_sample_design(dir, "one", 1);
    write_sample_design(dir, "two", 2);
    const auto path = write_lines(
        dir, "data.jsonl",
        {{{"design", "one.json"},
          {"labels", {{"alignment", 4}, {"white_space", 7}, {"overlap", 9}}},
          {"problems", {"the footer crowds the caption"}}},
         {{"design", "two.json"},
          {"labels", {{"alignment", 8}, {"spacing", 6}, {"overlap", 2}}}}});

    const auto dataset = load_dataset(path, DatasetProfile::by_name("gde"));
    REQUIRE(dataset.size() == 2);
    CHECK(dataset[0].design.id == "one");
    // "white_space" is the corpus name; internally it is "spacing".
    CHECK(std::get<double>(dataset[0].labels.at("spacing")) == 7.0);
    REQUIRE(dataset[0].problem_sentences.size() == 1);
    CHECK(dataset[1].problem_sentences.empty());
}

TEST_CASE("dataset errors name the offending line") {
    TempDir dir;
    write_sample_design(dir, "one", 1);
    const auto gde = DatasetProfile::by_name("gde");

    SUBCASE("binary value for a scale attribute") {
        const auto path = write_lines(
            dir, "bad.jsonl",
            {{{"design", "one.json"}, {"labels", {{"alignment", 5}}}},
             {{"design", "one.json"}, {"labels", {{"alignment", true}}}}});
        CHECK_THROWS_WITH_AS(load_dataset(path, gde),
                             doctest::Contains("dataset line 2"), ValidationError);
    }
    SUBCASE("label outside the profile") {
        const auto path = write_lines(
            dir, "bad.jsonl",
            {{{"design", "one.json"}, {"labels", {{"style", 5}}}}});
        CHECK_THROWS_WITH_AS(load_dataset(path, gde), doctest::Contains("style"),
                             ValidationError);
    }
    SUBCASE("duplicate design ids") {
        const auto path = write_lines(
            dir, "bad.jsonl",
            {{{"design", "one.json"}, {"labels", {{"alignment", 5}}}},
             {{"design", "one.json"}, {"labels", {{"alignment", 6}}}}});
        CHECK_THROWS_WITH_AS(load_dataset(path, gde), doctest::Contains("duplicate"),
                             ValidationError);
    }
    SUBCASE("empty file") {
        CHECK_THROWS_AS(load_dataset(write_lines(dir, "empty.jsonl", {}), gde),
                        ValidationError);
    }
}

TEST_CASE("discrete evaluation reproduces hand-checked confusion numbers") {
    using Maps = std::vector<std::map<std::string, bool>>;

    SUBCASE("perfect predictions score one everywhere") {
        const Maps labels = {{{"alignment", true}, {"overlap", false}},
                             {{"alignment", false}, {"overlap", false}}};
        const auto report = discrete_eval(labels, labels);
        CHECK(*report.macro_accuracy == doctest::Approx(1.0));
        CHECK(*report.macro_sensitivity == doctest::Approx(1.0));
        CHECK(*report.macro_specificity == doctest::Approx(1.0));
    }
    SUBCASE("one attribute, four designs, half right") {
        Maps labels, preds;
        const bool truth[4] = {true, true, false, false};
        const bool guess[4] = {true, false, false, true};
        for (int i = 0; i < 4; ++i) {
            labels.push_back({{"alignment", truth[i]}});
            preds.push_back({{"alignment", guess[i]}});
        }
        const auto report = discrete_eval(preds, labels);
        const auto& stats = report.binary.at("alignment");
        CHECK(stats.tp == 1);
        CHECK(stats.fn == 1);
        CHECK(stats.tn == 1);
        CHECK(stats.fp == 1);
        CHECK(stats.accuracy == doctest::Approx(0.5));
        CHECK(*stats.sensitivity == doctest::Approx(0.5));
        CHECK(*stats.specificity == doctest::Approx(0.5));
    }
    SUBCASE("an all-negative attribute leaves sensitivity undefined") {
        const Maps labels = {{{"overlap", false}}, {{"overlap", false}}};
        const Maps preds = {{{"overlap", false}}, {{"overlap", true}}};
        const auto report = discrete_eval(preds, labels);
        CHECK_FALSE(report.binary.at("overlap").sensitivity.has_value());
        CHECK_FALSE(report.macro_sensitivity.has_value());
        CHECK(*report.macro_specificity == doctest::Approx(0.5));
        REQUIRE(report.notes.size() == 1);
        CHECK(report.notes[0].find("no positive labels") != std::string::npos);
    }
    SUBCASE("misaligned keys are an error, not a silent zero") {
        const Maps labels = {{{"overlap", false}}};
        const Maps preds = {{{"alignment", false}}};
        CHECK_THROWS_WITH_AS(discrete_eval(preds, labels),
                             doctest::Contains("design #0"), ValidationError);
    }
}

TEST_CASE("pearson matches the hand-derived value and guards its domain") {
    CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(pearson({1}, {1}), ValidationError);
    CHECK_THROWS_AS(pearson({2, 2, 2}, {1, 2, 3}), ValidationError);
}

TEST_CASE("similarity coverage rewards matching feedback") {
    MockEmbeddingProvider embedder(32, 0);
    const std::vector<std::string> problems = {"the footer crowds the caption",
                                               "title color fights the background"};

    SUBCASE("echoing the problems back scores nearly one") {
        CHECK(aim_similarity(problems, problems, embedder) >= 0.99);
    }
    SUBCASE("no feedback scores zero") {
        CHECK(aim_similarity(problems, {}, embedder) == 0.0);
    }
    SUBCASE("extra feedback never lowers the score") {
        const std::vector<std::string> partial = {"the footer crowds the caption"};
        std::vector<std::string> extended = partial;
        extended.push_back("completely unrelated remark about pandas");
        CHECK(aim_similarity(problems, extended, embedder) >=
              aim_similarity(problems, partial, embedder));
    }
    SUBCASE("problems are required") {
        CHECK_THROWS_AS(aim_similarity({}, problems, embedder), ValidationError);
    }
}

TEST_CASE("the judge score passes through its schema") {
    const std::vector<std::string> problems = {"overlapping labels"};
    const std::vector<std::string> feedback = {"the labels overlap near the legend"};

    SUBCASE("a well-formed verdict is returned as-is") {
        MockChatClient judge(nlohmann::json::array({any_reply({{"score", 0.85}})}));
        CHECK(aim_judge(problems, feedback, judge) == doctest::Approx(0.85));
    }
    SUBCASE("an out-of-range score never validates") {
        MockChatClient judge(nlohmann::json::array({any_reply({{"score", 1.5}})}));
        CHECK_THROWS_AS(aim_judge(problems, feedback, judge), SchemaError);
    }
    SUBCASE("both sides must be non-empty") {
        MockChatClient judge(nlohmann::json::array({any_reply({{"score", 1.0}})}));
        CHECK_THROWS_AS(aim_judge({}, feedback, judge), ValidationError);
        CHECK_THROWS_AS(aim_judge(problems, {}, judge), ValidationError);
    }
}

namespace {

// Scripted replies for one scale-profile review: describer, the single
// surviving static reviewer, summarizer.  Three calls per design.
void push_gde_run(nlohmann::json& script, int base, double alignment, double spacing,
                  double overlap, const std::string& feedback_text) {
    script.push_back(indexed_reply(base, description_reply()));
    nlohmann::json ratings = {
        {"alignment", alignment}, {"spacing", spacing}, {"overlap", overlap}};
    nlohmann::json feedback = nlohmann::json::array();
    if (!feedback_text.empty())
        feedback.push_back(feedback_item("spacing", feedback_text, "major"));
    script.push_back(indexed_reply(base + 1, verdict_reply(ratings, feedback)));
    script.push_back(indexed_reply(base + 2, {{"summary", "done"}}));
}

} // namespace

TEST_CASE("the benchmark correlates scale ratings design by design") {
    TempDir dir;
    write_sample_design(dir, "good", 1);
    write_sample_design(dir, "bad", 2);
    const auto path = write_lines(
        dir, "data.jsonl",
        {{{"design", "good.json"},
          {"labels", {{"alignment", 8}, {"white_space", 7}, {"overlap", 9}}},
          {"problems", {"the footer crowds the caption"}}},
         {{"design", "bad.json"},
          {"labels", {{"alignment", 3}, {"spacing", 2}, {"overlap", 4}}},
          {"problems", {"items overlap near the header"}}}});

    ReviewConfig review_cfg;
    review_cfg.profile = DatasetProfile::by_name("gde");
    const auto dataset = load_dataset(path, review_cfg.profile);

    nlohmann::json script = nlohmann::json::array();
    push_gde_run(script, 0, 7, 6, 9, "the footer crowds the caption");
    push_gde_run(script, 3, 4, 3, 5, "items overlap near the header");
    MockChatClient client(script);
    MockEmbeddingProvider embedder(32, 0);

    const auto report =
        run_benchmark(dataset, {}, review_cfg, {}, embedder, client);
    CHECK(report.profile == "gde");
    CHECK(report.n_designs == 2);
    CHECK(report.binary.empty());
    // Two designs per attribute, predictions ordered like the labels:
    // every two-point non-constant series correlates perfectly.
    REQUIRE(report.scale_r.size() == 3);
    CHECK(report.scale_r.at("alignment") == doctest::Approx(1.0));
    CHECK(*report.mean_scale_r == doctest::Approx(1.0));
    // Feedback echoed the annotations word for word.
    CHECK(*report.aim_sim >= 0.99);
    CHECK_FALSE(report.aim_model.has_value());
    CHECK(report.notes.empty());
}

TEST_CASE("the benchmark takes majority votes over repeated runs") {
    TempDir dir;
    write_sample_design(dir, "solo", 1);
    const auto path = write_lines(
        dir, "data.jsonl",
        {{{"design", "solo.json"},
          {"labels",
           {{"alignment", true}, {"too_many_words", false}, {"style", false}}}}});

    ReviewConfig review_cfg; // full profile
    const auto dataset = load_dataset(path, review_cfg.profile);

    // Three full-pipeline runs, eight calls each.  Run votes:
    //   alignment       true, true, false -> majority true  (label true,  TP)
    //   too_many_words  false, true, true -> majority true  (label false, FP)
    //   style           false three times -> false          (label false, TN)
    nlohmann::json script = nlohmann::json::array();
    for (int run = 0; run < 3; ++run) {
        nlohmann::json one_run = golden_script();
        if (run >= 1) {
            nlohmann::json typography = clean_ratings(
                {"text_rendering_quality", "too_many_fonts", "bad_typography_colors"});
            typography["too_many_words"] = true;
            one_run[2] = indexed_reply(2, verdict_reply(typography));
        }
        if (run == 2) {
            nlohmann::json layout = clean_ratings(
                {"composition_and_layout", "alignment", "spacing", "overlap"});
            one_run[3] = indexed_reply(3, verdict_reply(layout));
        }
        for (auto& entry : one_run) {
            entry["match"]["index"] = entry["match"]["index"].get<int>() + 8 * run;
            script.push_back(std::move(entry));
        }
    }

    MockChatClient client(script);
    MockEmbeddingProvider embedder(32, 0);
    BenchConfig bench_cfg;
    bench_cfg.repeats = 3;

    const auto report =
        run_benchmark(dataset, {}, review_cfg, bench_cfg, embedder, client);
    CHECK(report.n_designs == 1);
    CHECK(report.binary.at("alignment").tp == 1);
    CHECK(report.binary.at("too_many_words").fp == 1);
    CHECK(report.binary.at("style").tn == 1);
    CHECK(*report.macro_accuracy == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("designs whose runs all fail are excluded, not fatal") {
    TempDir dir;
    write_sample_design(dir, "broken", 1);
    write_sample_design(dir, "fine", 2);
    const auto path = write_lines(
        dir, "data.jsonl",
        {{{"design", "broken.json"}, {"labels", {{"alignment", 5}}}},
         {{"design", "fine.json"}, {"labels", {{"alignment", 8}}}}});

    ReviewConfig review_cfg;
    review_cfg.profile = DatasetProfile::by_name("gde");
    const auto dataset = load_dataset(path, review_cfg.profile);
    // Pull the rendition out from under the first design.
    std::filesystem::remove(dir.file("broken.png"));

    nlohmann::json script = nlohmann::json::array();
    push_gde_run(script, 0, 7, 6, 9, "");
    MockChatClient client(script);
    MockEmbeddingProvider embedder(32, 0);

    const auto report =
        run_benchmark(dataset, {}, review_cfg, {}, embedder, client);
    CHECK(report.n_designs == 1);
    REQUIRE_FALSE(report.notes.empty());
    CHECK(report.notes[0].find("broken") != std::string::npos);
    CHECK(report.notes[0].find("excluded") != std::string::npos);
    // A single surviving design cannot correlate: noted, not fatal.
    CHECK(report.scale_r.empty());
    CHECK_FALSE(report.mean_scale_r.has_value());

    SUBCASE("when every design fails the benchmark itself fails") {
        std::filesystem::remove(dir.file("fine.png"));
        MockChatClient dead(nlohmann::json::array());
        CHECK_THROWS_AS(
            run_benchmark(dataset, {}, review_cfg, {}, embedder, dead),
            ProviderError);
    }
}

TEST_CASE("the judge path feeds the model coverage score") {
    TempDir dir;
    write_sample_design(dir, "solo", 1);
    const auto path = write_lines(dir, "data.jsonl",
                                  {{{"design", "solo.json"},
                                    {"labels", {{"alignment", 8}}},
                                    {"problems", {"the footer crowds the caption"}}}});

    ReviewConfig review_cfg;
    review_cfg.profile = DatasetProfile::by_name("gde");
    const auto dataset = load_dataset(path, review_cfg.profile);

    nlohmann::json script = nlohmann::json::array();
    push_gde_run(script, 0, 7, 6, 9, "the footer sits too close to the caption");
    script.push_back(indexed_reply(3, {{"score", 0.5}}));
    MockChatClient client(script);
    MockEmbeddingProvider embedder(32, 0);

    BenchConfig bench_cfg;
    bench_cfg.use_judge = true;
    const auto report =
        run_benchmark(dataset, {}, review_cfg, bench_cfg, embedder, client);
    CHECK(*report.aim_model == doctest::Approx(0.5));
    CHECK(report.aim_sim.has_value());
}
