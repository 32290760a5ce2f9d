#pragma once

#include "drs/design.hpp"
#include "drs/embedding.hpp"
#include "drs/graph.hpp"
#include "drs/transport.hpp"

#include <string>
#include <vector>

namespace drs {

struct RetrievalConfig {
    double alpha = 0.5; // first-order vs structural mix, in [0, 1]
    int k = 4;          // references to keep
    OTConfig ot;
    PatchGridSpec patch_grid;

    void validate() const;
};

struct ScoredCandidate {
    std::string design_id;
    int library_index = -1;
    double local = 0;  // alpha-blend of the two transport distances
    double global = 0; // whole-image feature gap
    double total = 0;  // local + global, ascending = more similar
};

// Candidates that could not be scored, with the reason.
struct SkippedCandidate {
    std::string design_id;
    int library_index = -1;
    std::string reason;
};

struct RetrievalResult {
    std::vector<ScoredCandidate> ranked; // ascending total, ties by library order
    std::vector<SkippedCandidate> skipped;
    double alpha = 0;
    int k = 0;
};

// Structural similarity between two design graphs: the alpha-weighted
// sum of the first-order transport distance (node features against
// node features) and the structural transport distance (edges against
// edges).  Single-node graphs contribute zero structural distance.
double local_score(const DesignGraph& query, const DesignGraph& candidate,
                   double alpha, const OTConfig& cfg);

// 1 - cosine between whole-rendition features.
double global_score(const Embedding& query_whole, const Embedding& candidate_whole);

// Scores every library design against the query and keeps the k best
// (ascending combined score).  Per-candidate failures are recorded and
// skipped; if every candidate fails, throws ProviderError.  An empty
// library is a ValidationError.
RetrievalResult select_top_k(const Design& query, const DesignLibrary& library,
                             EmbeddingProvider& provider, const RetrievalConfig& cfg);

} // namespace drs
