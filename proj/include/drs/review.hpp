#pragma once

#include "drs/chat.hpp"
#include "drs/design.hpp"
#include "drs/embedding.hpp"
#include "drs/errors.hpp"
#include "drs/retrieval.hpp"
#include "drs/sdd.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace drs {

// --- ratings and feedback ----------------------------------------------------

// Binary ratings flag "problem present"; scale ratings run 1..10,
// higher is better.
using Rating = std::variant<bool, double>;

nlohmann::json rating_to_json(const Rating& r);

enum class Severity { minor, major, critical };
std::string to_string(Severity s);
Severity severity_from_string(const std::string& s);

struct FeedbackItem {
    std::string attribute; // registry key
    std::string text;
    Severity severity = Severity::minor;
    std::vector<std::string> agents; // contributing reviewers, sorted
};

// --- dataset profiles ---------------------------------------------------------

// Which attributes a corpus annotates and how each one is rated.
struct DatasetProfile {
    std::string name;
    std::vector<std::string> attributes;        // registry keys, ordered
    std::map<std::string, RatingKind> kinds;    // one entry per attribute
    std::map<std::string, std::string> label_aliases; // dataset key -> registry key

    RatingKind kind_of(const std::string& key) const;
    bool has(const std::string& key) const;
    void validate() const;

    // Built-in profiles: "full", "infographic", "idd" (all fifteen
    // attributes, binary), "afixa" (five binary), "gde" (three on a
    // 1-10 scale).
    static DatasetProfile by_name(const std::string& name);
};

// --- review plan ---------------------------------------------------------------

enum class AgentKind { fixed, dynamic };

struct AttributeBucket {
    std::string agent_name;
    AgentKind kind = AgentKind::fixed;
    std::vector<std::string> attributes; // non-empty, registry keys
};

// The always-on reviewers: typography, layout and color, each owning a
// fixed slice of the attribute space.
std::vector<AttributeBucket> default_static_buckets();

struct ReviewPlan {
    std::vector<AttributeBucket> static_buckets;
    std::vector<AttributeBucket> dynamic_buckets;
    std::string rationale;

    std::vector<AttributeBucket> all_buckets() const;
    // Every attribute appears in at most one bucket and belongs to the
    // registry.
    void validate() const;
};

struct TraceEvent {
    std::string phase; // planning | reviewing | summarizing
    std::string agent;
    std::string detail;
};

struct AgentVerdict {
    std::string agent_name;
    AgentKind kind = AgentKind::fixed;
    std::map<std::string, Rating> ratings; // exactly the bucket attributes
    std::vector<FeedbackItem> feedback;
};

struct ReviewReport {
    std::string design_id;
    std::map<std::string, Rating> ratings;
    std::vector<FeedbackItem> feedback;
    std::string summary;
    ReviewPlan plan;
    std::vector<std::string> exemplar_ids;
    std::vector<TraceEvent> trace;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const; // deterministic byte-for-byte
};

struct ReviewConfig {
    DatasetProfile profile = DatasetProfile::by_name("full");
    std::vector<AttributeBucket> static_buckets = default_static_buckets();
    int max_dynamic_buckets = 3;
    double dedup_threshold = 0.9; // cosine at or above merges feedback
    SddTemplates sdd = SddTemplates::defaults();
    RetrievalConfig retrieval;

    void validate() const;
};

// Raised when the pipeline dies mid-flight; carries where it died, why
// (so callers can map exit codes), and the events recorded up to that
// point.
enum class FailureKind { validation, provider, internal };

class PipelineError : public Error {
public:
    PipelineError(const std::string& msg, std::string phase_name, FailureKind kind,
                  std::vector<TraceEvent> partial)
        : Error(msg), phase(std::move(phase_name)), cause(kind),
          trace(std::move(partial)) {}

    std::string phase;
    FailureKind cause;
    std::vector<TraceEvent> trace;
};

// --- pipeline stages ------------------------------------------------------------

// Intersects the configured static buckets with the profile, then asks
// the planner model to group the remaining attributes into up to
// max_dynamic_buckets thematic buckets.  Planner output is cleaned
// (unknown, already-covered and repeated attributes drop with a
// warning); output that never parses falls back to one bucket holding
// the whole remainder.
ReviewPlan plan_review(const Design& design, const DesignDescription& description,
                       const ReviewConfig& cfg, ChatClient& client,
                       std::vector<TraceEvent>* trace = nullptr,
                       std::vector<std::string>* warnings = nullptr);

// Runs one reviewer over its bucket: the design, its description and
// the retrieved reference designs go in; ratings for exactly the
// bucket's attributes plus free-form feedback come out.  Scale ratings
// outside 1..10 clamp with a warning; stray rating keys drop with a
// warning.
AgentVerdict review_bucket(const Design& design, const DesignDescription& description,
                           const std::vector<Design>& exemplars,
                           const AttributeBucket& bucket, const ReviewConfig& cfg,
                           ChatClient& client,
                           std::vector<std::string>* warnings = nullptr);

// Merges verdicts into the final report: ratings union (buckets are
// disjoint), near-duplicate feedback folded together (cosine of the
// text embeddings at or above dedup_threshold, higher severity wins,
// contributor lists union), plus a model-written closing summary.  A
// failed summary degrades to an empty string with a warning.  Exactly
// one verdict per planned bucket is required.
ReviewReport summarize_review(const Design& design,
                              const std::vector<AgentVerdict>& verdicts,
                              const ReviewPlan& plan, const ReviewConfig& cfg,
                              ChatClient& client, EmbeddingProvider& embedder,
                              std::vector<TraceEvent>* trace = nullptr,
                              std::vector<std::string>* warnings = nullptr);

// End-to-end review: retrieve references (skipped with a trace note
// when the library is empty), describe, plan, run every reviewer,
// summarize.  Any unrecoverable error aborts as PipelineError naming
// the phase and carrying the partial trace.
ReviewReport run_review_pipeline(const Design& design, const DesignLibrary& library,
                                 const ReviewConfig& cfg, EmbeddingProvider& embedder,
                                 ChatClient& client);

} // namespace drs
