#include "drs/bench.hpp"

#include "drs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace drs {

namespace {

double mean(const std::vector<double>& xs) {
    double total = 0;
    for (double x : xs) total += x;
    return total / xs.size();
}

} // namespace

std::vector<AnnotatedDesign> load_dataset(const std::filesystem::path& path,
                                          const DatasetProfile& profile) {
    profile.validate();
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open dataset " + path.string());
    auto base = path.parent_path();
    if (base.empty()) base = ".";

    std::vector<AnnotatedDesign> dataset;
    std::set<std::string> ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "dataset line " + std::to_string(line_no);

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(where + ": malformed JSON: " + e.what());
        }
        if (!doc.is_object() || !doc.contains("design") || !doc.contains("labels"))
            throw ValidationError(where + ": needs \"design\" and \"labels\"");

        AnnotatedDesign entry;
        std::filesystem::path dp = doc["design"].get<std::string>();
        entry.design = load_design(dp.is_absolute() ? dp : base / dp);
        if (!ids.insert(entry.design.id).second)
            throw ValidationError(where + ": duplicate design id \"" +
                                  entry.design.id + "\"");

        const auto& labels = doc["labels"];
        if (!labels.is_object() || labels.empty())
            throw ValidationError(where + ": \"labels\" must be a non-empty object");
        for (const auto& [raw_key, value] : labels.items()) {
            auto alias = profile.label_aliases.find(raw_key);
            const std::string key =
                alias == profile.label_aliases.end() ? raw_key : alias->second;
            if (!profile.has(key))
                throw ValidationError(where + ": label \"" + raw_key +
                                      "\" is not rated by profile \"" + profile.name + "\"");
            if (profile.kind_of(key) == RatingKind::binary) {
                if (!value.is_boolean())
                    throw ValidationError(where + ": label \"" + raw_key +
                                          "\" must be a boolean");
                entry.labels[key] = value.get<bool>();
            } else {
                if (!value.is_number())
                    throw ValidationError(where + ": label \"" + raw_key +
                                          "\" must be a number");
                const double score = value.get<double>();
                if (score < 1.0 || score > 10.0)
                    throw ValidationError(where + ": label \"" + raw_key +
                                          "\" must lie in [1, 10]");
                entry.labels[key] = score;
            }
        }

        if (auto it = doc.find("problems"); it != doc.end()) {
            if (!it->is_array())
                throw ValidationError(where + ": \"problems\" must be an array");
            for (const auto& p : *it) {
                if (!p.is_string() || p.get<std::string>().empty())
                    throw ValidationError(where +
                                          ": problem sentences must be non-empty strings");
                entry.problem_sentences.push_back(p.get<std::string>());
            }
        }
        dataset.push_back(std::move(entry));
    }
    if (dataset.empty())
        throw ValidationError("dataset " + path.string() + " holds no entries");
    return dataset;
}

MetricsReport discrete_eval(const std::vector<std::map<std::string, bool>>& predictions,
                            const std::vector<std::map<std::string, bool>>& labels) {
    if (predictions.empty() || predictions.size() != labels.size())
        throw ValidationError("discrete_eval needs matching, non-empty batches");

    std::map<std::string, ConfusionStats> per_attr;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& pred = predictions[i];
        const auto& label = labels[i];
        if (pred.size() != label.size())
            throw ValidationError("design #" + std::to_string(i) +
                                  ": prediction and label keys differ");
        for (const auto& [key, truth] : label) {
            auto it = pred.find(key);
            if (it == pred.end())
                throw ValidationError("design #" + std::to_string(i) +
                                      ": missing prediction for \"" + key + "\"");
            auto& stats = per_attr[key];
            if (truth)
                (it->second ? stats.tp : stats.fn)++;
            else
                (it->second ? stats.fp : stats.tn)++;
        }
    }

    MetricsReport report;
    report.n_designs = static_cast<int>(predictions.size());
    std::vector<double> accs, senss, specs;
    for (auto& [key, stats] : per_attr) {
        const int total = stats.tp + stats.tn + stats.fp + stats.fn;
        stats.accuracy = static_cast<double>(stats.tp + stats.tn) / total;
        if (stats.tp + stats.fn > 0)
            stats.sensitivity = static_cast<double>(stats.tp) / (stats.tp + stats.fn);
        else
            report.notes.push_back("attribute \"" + key +
                                   "\" has no positive labels; sensitivity undefined");
        if (stats.tn + stats.fp > 0)
            stats.specificity = static_cast<double>(stats.tn) / (stats.tn + stats.fp);
        else
            report.notes.push_back("attribute \"" + key +
                                   "\" has no negative labels; specificity undefined");
        accs.push_back(stats.accuracy);
        if (stats.sensitivity) senss.push_back(*stats.sensitivity);
        if (stats.specificity) specs.push_back(*stats.specificity);
        report.binary[key] = stats;
    }
    report.macro_accuracy = mean(accs);
    if (!senss.empty()) report.macro_sensitivity = mean(senss);
    if (!specs.empty()) report.macro_specificity = mean(specs);
    return report;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw ValidationError("pearson needs series of equal length");
    if (x.size() < 2)
        throw ValidationError("pearson needs at least two points");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw ValidationError("pearson inputs must be finite");

    const double mx = mean(x), my = mean(y);
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    if (vx == 0 || vy == 0)
        throw ValidationError("pearson undefined for a constant series");
    return cov / std::sqrt(vx * vy);
}

double aim_similarity(const std::vector<std::string>& problems,
                      const std::vector<std::string>& feedback,
                      EmbeddingProvider& embedder) {
    if (problems.empty())
        throw ValidationError("aim_similarity needs at least one problem sentence");
    if (feedback.empty()) return 0.0;

    std::vector<Embedding> feedback_vecs;
    feedback_vecs.reserve(feedback.size());
    for (const auto& text : feedback) feedback_vecs.push_back(embedder.embed_text(text));

    double total = 0;
    for (const auto& problem : problems) {
        const Embedding pv = embedder.embed_text(problem);
        double best = 0;
        for (const auto& fv : feedback_vecs)
            best = std::max(best, std::clamp(cosine(pv, fv), 0.0, 1.0));
        total += best;
    }
    return total / problems.size();
}

double aim_judge(const std::vector<std::string>& problems,
                 const std::vector<std::string>& feedback, ChatClient& judge) {
    if (problems.empty())
        throw ValidationError("aim_judge needs at least one problem sentence");
    if (feedback.empty())
        throw ValidationError("aim_judge needs at least one feedback item");

    ChatRequest request;
    request.system_prompt =
        "You grade how well review feedback covers a design's known problems. "
        "Score 1 when every problem is clearly addressed, 0 when none are. "
        "Answer with JSON only.";
    request.response_schema = {
        {"type", "object"},
        {"required", {"score"}},
        {"additionalProperties", false},
        {"properties",
         {{"score", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}}}},
    };
    std::ostringstream text;
    text << "Known problems:\n";
    for (const auto& p : problems) text << "- " << p << "\n";
    text << "\nReview feedback:\n";
    for (const auto& f : feedback) text << "- " << f << "\n";
    text << "\nReturn JSON {\"score\": <coverage fraction in [0,1]>}.";
    request.user_parts.push_back(UserPart::make_text(text.str()));

    return judge.complete(request).parsed.at("score").get<double>();
}

MetricsReport run_benchmark(const std::vector<AnnotatedDesign>& dataset,
                            const DesignLibrary& library, const ReviewConfig& review_cfg,
                            const BenchConfig& bench_cfg, EmbeddingProvider& embedder,
                            ChatClient& client) {
    if (dataset.empty())
        throw ValidationError("benchmark dataset must be non-empty");
    if (bench_cfg.repeats < 1)
        throw ValidationError("repeats must be at least 1");
    review_cfg.validate();

    MetricsReport report;
    report.profile = review_cfg.profile.name;

    std::vector<std::map<std::string, bool>> bin_preds, bin_labels;
    std::map<std::string, std::vector<std::pair<double, double>>> scale_pairs;
    std::vector<double> sim_scores, judge_scores;
    std::set<std::string> defaulted_attrs;

    for (const auto& entry : dataset) {
        // Gather the successful runs for this design.
        std::vector<ReviewReport> runs;
        std::string last_error;
        for (int r = 0; r < bench_cfg.repeats; ++r) {
            try {
                runs.push_back(run_review_pipeline(entry.design, library, review_cfg,
                                                   embedder, client));
            } catch (const Error& e) {
                last_error = e.what();
            }
        }
        if (runs.empty()) {
            report.notes.push_back("design \"" + entry.design.id +
                                   "\" excluded: every run failed (" + last_error + ")");
            continue;
        }
        ++report.n_designs;

        // Aggregate ratings across runs: majority for flags (ties count
        // as problem-present), mean for scales.
        std::map<std::string, bool> bin_pred, bin_label;
        for (const auto& [key, label] : entry.labels) {
            if (review_cfg.profile.kind_of(key) == RatingKind::binary) {
                int flags = 0, votes = 0;
                for (const auto& run : runs) {
                    auto it = run.ratings.find(key);
                    if (it == run.ratings.end()) continue;
                    ++votes;
                    if (std::get<bool>(it->second)) ++flags;
                }
                if (votes == 0) {
                    if (defaulted_attrs.insert(key).second)
                        report.notes.push_back("attribute \"" + key +
                                               "\" was never rated; counting as "
                                               "problem-absent");
                    bin_pred[key] = false;
                } else {
                    bin_pred[key] = 2 * flags >= votes;
                }
                bin_label[key] = std::get<bool>(label);
            } else {
                std::vector<double> scores;
                for (const auto& run : runs) {
                    auto it = run.ratings.find(key);
                    if (it != run.ratings.end())
                        scores.push_back(std::get<double>(it->second));
                }
                if (scores.empty()) {
                    if (defaulted_attrs.insert(key).second)
                        report.notes.push_back("attribute \"" + key +
                                               "\" was never rated; dropped from "
                                               "correlation");
                    continue;
                }
                scale_pairs[key].emplace_back(mean(scores), std::get<double>(label));
            }
        }
        if (!bin_label.empty()) {
            bin_preds.push_back(std::move(bin_pred));
            bin_labels.push_back(std::move(bin_label));
        }

        // Coverage scoring against the annotator's problem sentences,
        // over the union of feedback texts from all runs.
        if (!entry.problem_sentences.empty()) {
            std::vector<std::string> feedback;
            std::set<std::string> seen;
            for (const auto& run : runs)
                for (const auto& item : run.feedback)
                    if (seen.insert(item.text).second) feedback.push_back(item.text);
            sim_scores.push_back(
                aim_similarity(entry.problem_sentences, feedback, embedder));
            if (bench_cfg.use_judge) {
                if (feedback.empty()) {
                    report.notes.push_back("design \"" + entry.design.id +
                                           "\" produced no feedback; judge score 0");
                    judge_scores.push_back(0.0);
                } else {
                    judge_scores.push_back(
                        aim_judge(entry.problem_sentences, feedback, client));
                }
            }
        }
    }

    if (report.n_designs == 0)
        throw ProviderError("benchmark failed: every design was excluded");

    if (!bin_preds.empty()) {
        MetricsReport discrete = discrete_eval(bin_preds, bin_labels);
        report.binary = std::move(discrete.binary);
        report.macro_accuracy = discrete.macro_accuracy;
        report.macro_sensitivity = discrete.macro_sensitivity;
        report.macro_specificity = discrete.macro_specificity;
        for (auto& note : discrete.notes) report.notes.push_back(std::move(note));
    }

    std::vector<double> rs;
    for (const auto& [key, pairs] : scale_pairs) {
        if (pairs.size() < 2) {
            report.notes.push_back("attribute \"" + key +
                                   "\" has fewer than two scored designs; correlation "
                                   "skipped");
            continue;
        }
        std::vector<double> xs, ys;
        for (const auto& [pred, label] : pairs) {
            xs.push_back(pred);
            ys.push_back(label);
        }
        try {
            const double r = pearson(xs, ys);
            report.scale_r[key] = r;
            rs.push_back(r);
        } catch (const ValidationError& e) {
            report.notes.push_back("attribute \"" + key +
                                   "\" correlation skipped: " + e.what());
        }
    }
    if (!rs.empty()) report.mean_scale_r = mean(rs);
    if (!sim_scores.empty()) report.aim_sim = mean(sim_scores);
    if (!judge_scores.empty()) report.aim_model = mean(judge_scores);
    return report;
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json doc;
    doc["profile"] = profile;
    doc["n_designs"] = n_designs;
    doc["binary"] = nlohmann::json::object();
    for (const auto& [key, stats] : binary) {
        nlohmann::json sj = {{"tp", stats.tp}, {"tn", stats.tn},  {"fp", stats.fp},
                             {"fn", stats.fn}, {"accuracy", stats.accuracy}};
        if (stats.sensitivity) sj["sensitivity"] = *stats.sensitivity;
        if (stats.specificity) sj["specificity"] = *stats.specificity;
        doc["binary"][key] = std::move(sj);
    }
    doc["scale_r"] = nlohmann::json::object();
    for (const auto& [key, r] : scale_r) doc["scale_r"][key] = r;
    if (macro_accuracy) doc["macro_accuracy"] = *macro_accuracy;
    if (macro_sensitivity) doc["macro_sensitivity"] = *macro_sensitivity;
    if (macro_specificity) doc["macro_specificity"] = *macro_specificity;
    if (mean_scale_r) doc["mean_scale_r"] = *mean_scale_r;
    if (aim_sim) doc["aim_sim"] = *aim_sim;
    if (aim_model) doc["aim_model"] = *aim_model;
    doc["notes"] = notes;
    return doc;
}

} // namespace drs
