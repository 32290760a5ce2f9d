#include "drs/graph.hpp"

#include "drs/errors.hpp"

#include <cmath>
#include <numbers>

namespace drs {

void DesignGraph::validate() const {
    const int n = size();
    if (n == 0)
        throw ValidationError("design graph must have at least one node");
    if (node_weights.size() != n || edges.rows() != n || edges.cols() != n)
        throw ValidationError("design graph shapes are inconsistent");
    if (std::abs(node_weights.sum() - 1.0) > 1e-9 || (node_weights.array() <= 0).any())
        throw ValidationError("node weights must be positive and sum to 1");
    if (!edges.allFinite() || (edges.array() < 0).any())
        throw ValidationError("edge distances must be finite and non-negative");
    if ((edges - edges.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("edge distances must be symmetric");
    if (edges.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("edge diagonal must be exactly zero");
    if (mode == GraphMode::layout && static_cast<int>(centers.size()) != n)
        throw ValidationError("layout graphs need one center per node");
    for (const auto& e : nodes)
        if (e.dim() != nodes.front().dim())
            throw ValidationError("node embeddings must share one dimension");
}

double spatial_distance(std::pair<double, double> cu, std::pair<double, double> cv) {
    const double dx = cu.first - cv.first;
    const double dy = cu.second - cv.second;
    return std::sqrt(dx * dx + dy * dy) / std::numbers::sqrt2;
}

namespace {

// 1 - cosine, clamped so identical vectors give exactly 0 despite
// floating-point roundoff pushing the cosine a hair past 1.
double feature_distance(const Embedding& a, const Embedding& b) {
    return std::max(0.0, 1.0 - cosine(a, b));
}

DesignGraph finish_graph(DesignGraph graph) {
    const int n = graph.size();
    graph.node_weights = Vector::Constant(n, 1.0 / n);
    graph.edges = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = feature_distance(graph.nodes[i], graph.nodes[j]);
            if (graph.mode == GraphMode::layout)
                d += spatial_distance(graph.centers[i], graph.centers[j]);
            graph.edges(i, j) = d;
            graph.edges(j, i) = d;
        }
    graph.validate();
    return graph;
}

} // namespace

DesignGraph build_graph_layout(const Design& design, const Image& rendition,
                               EmbeddingProvider& provider) {
    design.validate();
    if (!design.has_layout())
        throw ValidationError("design \"" + design.id +
                              "\" has no layout; use the patch graph instead");

    DesignGraph graph;
    graph.mode = GraphMode::layout;
    graph.nodes.reserve(design.elements.size());
    graph.centers.reserve(design.elements.size());
    for (const auto& element : design.elements) {
        graph.nodes.push_back(
            provider.embed_image(crop_element(rendition, design, element)));
        graph.centers.emplace_back(element.bbox.center_x() / design.canvas_w,
                                   element.bbox.center_y() / design.canvas_h);
    }
    return finish_graph(std::move(graph));
}

DesignGraph build_graph_layout(const Design& design, EmbeddingProvider& provider) {
    return build_graph_layout(design, load_image(design.rendition_path), provider);
}

DesignGraph build_graph_patch(const Image& rendition, EmbeddingProvider& provider,
                              PatchGridSpec grid) {
    DesignGraph graph;
    graph.mode = GraphMode::patch;
    graph.nodes = provider.embed_patches(rendition, grid.rows, grid.cols).patches;
    return finish_graph(std::move(graph));
}

DesignGraph build_graph_patch(const Design& design, EmbeddingProvider& provider,
                              PatchGridSpec grid) {
    design.validate();
    return build_graph_patch(load_image(design.rendition_path), provider, grid);
}

DesignGraph build_graph(const Design& design, EmbeddingProvider& provider,
                        PatchGridSpec grid) {
    return design.has_layout() ? build_graph_layout(design, provider)
                               : build_graph_patch(design, provider, grid);
}

} // namespace drs
