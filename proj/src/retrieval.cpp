#include "drs/retrieval.hpp"

#include "drs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace drs {

void RetrievalConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("alpha must lie in [0, 1], got " + std::to_string(alpha));
    if (k < 1)
        throw ValidationError("k must be at least 1, got " + std::to_string(k));
    if (patch_grid.rows < 1 || patch_grid.cols < 1)
        throw ValidationError("patch grid must be at least 1x1");
    ot.validate();
}

double local_score(const DesignGraph& query, const DesignGraph& candidate,
                   double alpha, const OTConfig& cfg) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("alpha must lie in [0, 1], got " + std::to_string(alpha));

    double first_order = 0;
    if (alpha > 0.0) {
        Matrix cost(query.size(), candidate.size());
        for (int i = 0; i < query.size(); ++i)
            for (int j = 0; j < candidate.size(); ++j)
                cost(i, j) =
                    std::max(0.0, 1.0 - cosine(query.nodes[i], candidate.nodes[j]));
        first_order =
            wasserstein(cost, query.node_weights, candidate.node_weights, cfg).distance;
    }

    // A single node carries no pairwise structure, so the structural
    // term is zero by convention rather than a degenerate solve.
    double structural = 0;
    if (alpha < 1.0 && query.size() > 1 && candidate.size() > 1)
        structural = gromov_wasserstein(query.edges, candidate.edges,
                                        query.node_weights, candidate.node_weights, cfg)
                         .distance;

    return alpha * first_order + (1.0 - alpha) * structural;
}

double global_score(const Embedding& query_whole, const Embedding& candidate_whole) {
    return std::max(0.0, 1.0 - cosine(query_whole, candidate_whole));
}

RetrievalResult select_top_k(const Design& query, const DesignLibrary& library,
                             EmbeddingProvider& provider, const RetrievalConfig& cfg) {
    cfg.validate();
    query.validate();
    if (library.empty())
        throw ValidationError("cannot retrieve from an empty library");

    // Query features are computed once and reused across candidates.
    const Image query_img = load_image(query.rendition_path);
    const DesignGraph query_graph =
        query.has_layout() ? build_graph_layout(query, query_img, provider)
                           : build_graph_patch(query_img, provider, cfg.patch_grid);
    const Embedding query_whole = provider.embed_image(query_img);

    RetrievalResult result;
    result.alpha = cfg.alpha;
    result.k = cfg.k;

    for (std::size_t idx = 0; idx < library.entries.size(); ++idx) {
        const Design& candidate = library.entries[idx];
        try {
            const Image img = load_image(candidate.rendition_path);
            const DesignGraph graph =
                candidate.has_layout()
                    ? build_graph_layout(candidate, img, provider)
                    : build_graph_patch(img, provider, cfg.patch_grid);
            ScoredCandidate scored;
            scored.design_id = candidate.id;
            scored.library_index = static_cast<int>(idx);
            scored.local = local_score(query_graph, graph, cfg.alpha, cfg.ot);
            scored.global = global_score(query_whole, provider.embed_image(img));
            scored.total = scored.local + scored.global;
            result.ranked.push_back(std::move(scored));
        } catch (const Error& e) {
            result.skipped.push_back(
                {candidate.id, static_cast<int>(idx), e.what()});
        }
    }

    if (result.ranked.empty()) {
        std::string msg = "every library candidate failed to score:";
        for (const auto& s : result.skipped)
            msg += " [" + s.design_id + "] " + s.reason + ";";
        throw ProviderError(msg);
    }

    std::sort(result.ranked.begin(), result.ranked.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                  if (a.total != b.total) return a.total < b.total;
                  return a.library_index < b.library_index;
              });
    if (static_cast<int>(result.ranked.size()) > cfg.k)
        result.ranked.resize(cfg.k);
    return result;
}

} // namespace drs
