#include "drs/design.hpp"
#include "drs/errors.hpp"
#include "drs/graph.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

using namespace drs;
using namespace drs::test;

TEST_CASE("layout graphs carry one node per element") {
    TempDir dir;
    const Design design = load_design(write_sample_design(dir, "flyer"));
    MockEmbeddingProvider provider(16, 0);

    const auto graph = build_graph_layout(design, provider);
    REQUIRE(graph.size() == 3);
    CHECK(graph.mode == GraphMode::layout);
    CHECK(graph.node_weights.sum() == doctest::Approx(1.0));
    CHECK(graph.node_weights(0) == doctest::Approx(1.0 / 3));
    REQUIRE(graph.centers.size() == 3);
    // First element spans (10,5)-(90,20) on a 100x100 canvas.
    CHECK(graph.centers[0].first == doctest::Approx(0.5));
    CHECK(graph.centers[0].second == doctest::Approx(0.125));
    CHECK_NOTHROW(graph.validate());
}

TEST_CASE("layout edges add spatial and feature distance") {
    TempDir dir;
    // Two identical-content elements at different places: the feature term
    // is 0, so the edge is exactly the normalized center distance.
    Image img = solid_image(100, 100, 80, 80, 80);
    const auto path = write_design(dir, "twins", img,
                                   {{"left", ElementKind::shape, 0, 0, 20, 20},
                                    {"right", ElementKind::shape, 80, 0, 100, 20}});
    const Design design = load_design(path);
    MockEmbeddingProvider provider(16, 0);

    const auto graph = build_graph_layout(design, provider);
    const double expected = spatial_distance({0.1, 0.1}, {0.9, 0.1});
    CHECK(graph.edges(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(graph.edges(1, 0) == graph.edges(0, 1));
    CHECK(graph.edges(0, 0) == 0.0);
}

TEST_CASE("spatial distance is normalized to the unit square diagonal") {
    CHECK(spatial_distance({0, 0}, {1, 1}) == doctest::Approx(1.0));
    CHECK(spatial_distance({0.5, 0.5}, {0.5, 0.5}) == 0.0);
}

TEST_CASE("patch graphs cover the rendition with a grid") {
    TempDir dir;
    const auto path = write_design(dir, "raw", textured_image(21, 14, 6), {});
    const Design design = load_design(path);
    MockEmbeddingProvider provider(16, 0);

    const auto graph = build_graph_patch(design, provider, {3, 3});
    REQUIRE(graph.size() == 9);
    CHECK(graph.mode == GraphMode::patch);
    CHECK(graph.centers.empty());
    CHECK_NOTHROW(graph.validate());
    // Distinct tiles embed differently, so off-diagonal edges are positive.
    CHECK(graph.edges(0, 1) > 0.0);
}

TEST_CASE("the graph builder dispatches on layout availability") {
    TempDir dir;
    MockEmbeddingProvider provider(16, 0);

    const Design with_layout = load_design(write_sample_design(dir, "laid"));
    CHECK(build_graph(with_layout, provider, {2, 2}).mode == GraphMode::layout);

    const Design bare =
        load_design(write_design(dir, "bare", textured_image(10, 10, 2), {}));
    CHECK(build_graph(bare, provider, {2, 2}).mode == GraphMode::patch);
    CHECK(build_graph(bare, provider, {2, 2}).size() == 4);

    CHECK_THROWS_AS(build_graph_layout(bare, provider), ValidationError);
}

TEST_CASE("graph validation rejects inconsistent structures") {
    TempDir dir;
    MockEmbeddingProvider provider(16, 0);
    auto graph = build_graph_patch(textured_image(8, 8, 1), provider, {2, 2});

    SUBCASE("asymmetric edges") {
        graph.edges(0, 1) += 0.5;
        CHECK_THROWS_AS(graph.validate(), ValidationError);
    }
    SUBCASE("nonzero diagonal") {
        graph.edges(1, 1) = 1e-9;
        CHECK_THROWS_AS(graph.validate(), ValidationError);
    }
    SUBCASE("weights off the simplex") {
        graph.node_weights(0) += 0.1;
        CHECK_THROWS_AS(graph.validate(), ValidationError);
    }
    SUBCASE("mixed embedding dimensions") {
        graph.nodes[2].values.push_back(0.0);
        CHECK_THROWS_AS(graph.validate(), ValidationError);
    }
}
