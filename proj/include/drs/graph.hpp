#pragma once

#include "drs/design.hpp"
#include "drs/embedding.hpp"
#include "drs/transport.hpp"

#include <vector>

namespace drs {

enum class GraphMode { layout, patch };

// Rectangular patch grid used for designs without machine-readable
// layout.
struct PatchGridSpec {
    int rows = 7;
    int cols = 7;
};

// A design rendered as a weighted graph: one node per element (or
// patch), carrying its feature vector, with pairwise edge distances.
struct DesignGraph {
    GraphMode mode = GraphMode::layout;
    std::vector<Embedding> nodes;
    Vector node_weights; // uniform 1/n, sums to 1
    Matrix edges;        // symmetric, zero diagonal, >= 0

    // Canvas-normalized element centers; layout mode only.
    std::vector<std::pair<double, double>> centers;

    int size() const { return static_cast<int>(nodes.size()); }
    void validate() const;
};

// Normalized spatial gap between two canvas-relative centers,
// ||cu - cv|| / sqrt(2), so opposite canvas corners measure 1.
double spatial_distance(std::pair<double, double> cu, std::pair<double, double> cv);

// One node per element; edge distance = spatial gap + feature gap
// (1 - cosine).  The design must have a layout.
DesignGraph build_graph_layout(const Design& design, EmbeddingProvider& provider);
DesignGraph build_graph_layout(const Design& design, const Image& rendition,
                               EmbeddingProvider& provider);

// One node per grid patch; edge distance = feature gap only.
DesignGraph build_graph_patch(const Design& design, EmbeddingProvider& provider,
                              PatchGridSpec grid = {});
DesignGraph build_graph_patch(const Image& rendition, EmbeddingProvider& provider,
                              PatchGridSpec grid = {});

// Layout graph when elements are known, patch graph otherwise.
DesignGraph build_graph(const Design& design, EmbeddingProvider& provider,
                        PatchGridSpec grid = {});

} // namespace drs
