#pragma once

#include "drs/design.hpp"
#include "drs/embedding.hpp"
#include "drs/review.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace drs {

// One labeled corpus entry: a design, its ground-truth ratings, and
// optionally the annotator-written problem sentences.
struct AnnotatedDesign {
    Design design;
    std::map<std::string, Rating> labels; // registry keys per the profile
    std::vector<std::string> problem_sentences;
};

// Loads a JSON-lines file:
//   { "design": path, "labels": {key: bool|number}, "problems": [str]? }
// Label keys pass through the profile's alias map and must land on
// profile attributes with the right value type.
std::vector<AnnotatedDesign> load_dataset(const std::filesystem::path& path,
                                          const DatasetProfile& profile);

// Confusion-matrix summary for one binary attribute.  Positive means
// "problem present".  Rates with an empty denominator are undefined.
struct ConfusionStats {
    int tp = 0, tn = 0, fp = 0, fn = 0;
    double accuracy = 0;
    std::optional<double> sensitivity; // tp / (tp + fn)
    std::optional<double> specificity; // tn / (tn + fp)
};

struct MetricsReport {
    std::string profile;
    int n_designs = 0;
    std::map<std::string, ConfusionStats> binary; // per binary attribute
    std::map<std::string, double> scale_r;        // per scale attribute, pearson r
    std::optional<double> macro_accuracy;
    std::optional<double> macro_sensitivity; // over attributes where defined
    std::optional<double> macro_specificity;
    std::optional<double> mean_scale_r;
    std::optional<double> aim_sim;   // embedding-based coverage
    std::optional<double> aim_model; // judge-model coverage
    std::vector<std::string> notes;  // exclusions and degradations

    nlohmann::json to_json() const;
};

// Per-attribute confusion stats plus unweighted macro averages over a
// batch of binary predictions.  Every prediction map must carry exactly
// the same keys as its label map.
MetricsReport discrete_eval(const std::vector<std::map<std::string, bool>>& predictions,
                            const std::vector<std::map<std::string, bool>>& labels);

// Pearson correlation; both series must have equal length >= 2, finite
// values and non-zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Mean over problems of the best feedback match, where a match is the
// cosine of the text embeddings clamped into [0, 1].  No feedback
// scores 0; adding feedback can only raise the score.
double aim_similarity(const std::vector<std::string>& problems,
                      const std::vector<std::string>& feedback,
                      EmbeddingProvider& embedder);

// Judge-model coverage score in [0, 1].  Problems and feedback must be
// non-empty; the reply schema pins the score range.
double aim_judge(const std::vector<std::string>& problems,
                 const std::vector<std::string>& feedback, ChatClient& judge);

struct BenchConfig {
    int repeats = 1;        // pipeline runs per design
    bool use_judge = false; // also compute the judge-model coverage score
};

// Reviews every dataset design (repeats times; binary ratings take the
// majority with ties counting as problem-present, scale ratings take
// the mean), then scores predictions against the labels.  Designs whose
// runs all fail are excluded with a note; labeled attributes the
// pipeline never rated count as problem-absent (binary, with a note) or
// drop from the correlation (scale, with a note).
MetricsReport run_benchmark(const std::vector<AnnotatedDesign>& dataset,
                            const DesignLibrary& library, const ReviewConfig& review_cfg,
                            const BenchConfig& bench_cfg, EmbeddingProvider& embedder,
                            ChatClient& client);

} // namespace drs
