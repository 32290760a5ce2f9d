#include "drs/errors.hpp"
#include "drs/retrieval.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>

using namespace drs;
using namespace drs::test;

namespace {

DesignLibrary library_of(const std::vector<std::string>& paths) {
    DesignLibrary lib;
    for (const auto& p : paths) {
        lib.entries.push_back(load_design(p));
        lib.entries.back().role = DesignRole::library;
    }
    return lib;
}

} // namespace

TEST_CASE("an exact copy of the query ranks first with a vanishing score") {
    TempDir dir;
    const auto query_path = write_sample_design(dir, "query", 7);
    Design query = load_design(query_path);

    // The twin shares every pixel and every element with the query.
    auto twin = query;
    twin.id = "twin";
    const auto lib = library_of({write_sample_design(dir, "other-a", 8),
                                 write_sample_design(dir, "other-b", 9)});
    DesignLibrary full = lib;
    full.entries.insert(full.entries.begin(), twin);

    MockEmbeddingProvider provider(16, 0);
    const auto result = select_top_k(query, full, provider, {});
    REQUIRE_FALSE(result.ranked.empty());
    CHECK(result.ranked.front().design_id == "twin");
    CHECK(result.ranked.front().total <= 1e-3);
    CHECK(result.ranked.front().total < result.ranked[1].total);
}

TEST_CASE("ranking scores are invariant under library order") {
    TempDir dir;
    const Design query = load_design(write_sample_design(dir, "query", 1));
    auto lib = library_of({write_sample_design(dir, "a", 2),
                           write_sample_design(dir, "b", 3),
                           write_sample_design(dir, "c", 4)});
    MockEmbeddingProvider provider(16, 0);

    const auto forward = select_top_k(query, lib, provider, {});
    std::reverse(lib.entries.begin(), lib.entries.end());
    const auto reversed = select_top_k(query, lib, provider, {});

    auto totals = [](const RetrievalResult& r) {
        std::vector<double> t;
        for (const auto& s : r.ranked) t.push_back(s.total);
        std::sort(t.begin(), t.end());
        return t;
    };
    CHECK(totals(forward) == totals(reversed));
    // And the identity of the best candidate is stable too.
    CHECK(forward.ranked.front().design_id == reversed.ranked.front().design_id);
}

TEST_CASE("the mixing weight interpolates linearly between the two transports") {
    TempDir dir;
    MockEmbeddingProvider provider(16, 0);
    const Design a = load_design(write_sample_design(dir, "a", 5));
    const Design b = load_design(write_sample_design(dir, "b", 6));
    const auto ga = build_graph(a, provider, {});
    const auto gb = build_graph(b, provider, {});

    const OTConfig cfg;
    const double w_only = local_score(ga, gb, 1.0, cfg);
    const double gw_only = local_score(ga, gb, 0.0, cfg);
    const double mixed = local_score(ga, gb, 0.5, cfg);
    CHECK(mixed == doctest::Approx(0.5 * (w_only + gw_only)).epsilon(1e-12));
    CHECK(w_only > 0.0);
}

TEST_CASE("k truncates the ranking but skips still surface") {
    TempDir dir;
    const Design query = load_design(write_sample_design(dir, "query", 1));
    auto lib = library_of({write_sample_design(dir, "a", 2),
                           write_sample_design(dir, "b", 3),
                           write_sample_design(dir, "c", 4)});
    // Break one candidate after loading: its rendition no longer exists.
    lib.entries[1].rendition_path = (dir.path() / "gone.png").string();

    MockEmbeddingProvider provider(16, 0);
    RetrievalConfig cfg;
    cfg.k = 1;
    const auto result = select_top_k(query, lib, provider, cfg);
    CHECK(result.ranked.size() == 1);
    CHECK(result.k == 1);
    REQUIRE(result.skipped.size() == 1);
    CHECK(result.skipped[0].design_id == "b");
    CHECK_FALSE(result.skipped[0].reason.empty());
}

TEST_CASE("retrieval failure modes") {
    TempDir dir;
    const Design query = load_design(write_sample_design(dir, "query", 1));
    MockEmbeddingProvider provider(16, 0);

    SUBCASE("empty library") {
        CHECK_THROWS_AS(select_top_k(query, {}, provider, {}), ValidationError);
    }
    SUBCASE("every candidate broken") {
        auto lib = library_of({write_sample_design(dir, "a", 2)});
        lib.entries[0].rendition_path = (dir.path() / "gone.png").string();
        CHECK_THROWS_WITH_AS(select_top_k(query, lib, provider, {}),
                             doctest::Contains("a"), ProviderError);
    }
    SUBCASE("mixing weight outside [0, 1]") {
        RetrievalConfig cfg;
        cfg.alpha = 1.5;
        CHECK_THROWS_AS(select_top_k(query, library_of({}), provider, cfg),
                        ValidationError);
    }
}

TEST_CASE("single-element designs still score") {
    TempDir dir;
    MockEmbeddingProvider provider(16, 0);
    const auto one = write_design(dir, "one", textured_image(20, 20, 1),
                                  {{"only", ElementKind::shape, 2, 2, 18, 18}});
    const auto two = write_design(dir, "two", textured_image(20, 20, 2),
                                  {{"left", ElementKind::shape, 1, 1, 9, 19},
                                   {"right", ElementKind::shape, 11, 1, 19, 19}});
    const Design query = load_design(one);
    const auto result = select_top_k(query, library_of({two}), provider, {});
    REQUIRE(result.ranked.size() == 1);
    CHECK(result.ranked[0].total > 0.0);
}
