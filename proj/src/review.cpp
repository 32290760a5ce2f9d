#include "drs/review.hpp"

#include "drs/errors.hpp"
#include "drs/image.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace drs {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string rating_instruction(const WorldAttribute& attr, RatingKind kind) {
    std::string line = "- " + attr.key + " (" + attr.display_name + "): " + attr.description;
    if (kind == RatingKind::binary)
        line += " Answer true if this problem is present, false if it is not.";
    else
        line += " Rate from 1 to 10, where 10 is flawless.";
    return line;
}

std::string rating_text(const std::string& key, const Rating& r) {
    if (std::holds_alternative<bool>(r))
        return key + ": " + (std::get<bool>(r) ? "problem present" : "no problem");
    std::ostringstream out;
    out << key << ": " << std::get<double>(r) << "/10";
    return out.str();
}

UserPart rendition_part(const Design& design) {
    auto bytes = read_file_bytes(design.rendition_path);
    auto mime = sniff_image_mime(bytes);
    return UserPart::make_image(std::move(bytes), std::move(mime));
}

void record(std::vector<TraceEvent>* trace, std::string phase, std::string agent,
            std::string detail) {
    if (trace) trace->push_back({std::move(phase), std::move(agent), std::move(detail)});
}

void warn(std::vector<std::string>* warnings, std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
}

} // namespace

// --- ratings and feedback -------------------------------------------------------

nlohmann::json rating_to_json(const Rating& r) {
    if (std::holds_alternative<bool>(r)) return std::get<bool>(r);
    return std::get<double>(r);
}

std::string to_string(Severity s) {
    switch (s) {
    case Severity::minor: return "minor";
    case Severity::major: return "major";
    default: return "critical";
    }
}

Severity severity_from_string(const std::string& s) {
    if (s == "minor") return Severity::minor;
    if (s == "major") return Severity::major;
    if (s == "critical") return Severity::critical;
    throw ValidationError("unknown severity \"" + s + "\"");
}

// --- dataset profiles -------------------------------------------------------------

RatingKind DatasetProfile::kind_of(const std::string& key) const {
    auto it = kinds.find(key);
    if (it == kinds.end())
        throw ValidationError("profile \"" + name + "\" does not rate \"" + key + "\"");
    return it->second;
}

bool DatasetProfile::has(const std::string& key) const {
    return kinds.count(key) > 0;
}

void DatasetProfile::validate() const {
    if (attributes.empty())
        throw ValidationError("profile \"" + name + "\" must rate at least one attribute");
    std::set<std::string> seen;
    for (const auto& key : attributes) {
        attribute_by_key(key); // throws on unknown keys
        if (!seen.insert(key).second)
            throw ValidationError("profile \"" + name + "\" repeats attribute \"" + key + "\"");
        if (!kinds.count(key))
            throw ValidationError("profile \"" + name + "\" missing rating kind for \"" +
                                  key + "\"");
    }
    if (kinds.size() != attributes.size())
        throw ValidationError("profile \"" + name + "\" rates keys outside its attribute list");
    for (const auto& [from, to] : label_aliases)
        if (!seen.count(to))
            throw ValidationError("profile \"" + name + "\" alias \"" + from +
                                  "\" targets unknown attribute \"" + to + "\"");
}

DatasetProfile DatasetProfile::by_name(const std::string& name) {
    DatasetProfile profile;
    profile.name = name;
    if (name == "full" || name == "infographic" || name == "idd") {
        for (const auto& attr : world_attributes()) {
            profile.attributes.push_back(attr.key);
            profile.kinds[attr.key] = RatingKind::binary;
        }
    } else if (name == "afixa") {
        profile.attributes = {"wrong_color_palettes", "bad_typography_colors",
                              "bad_images", "too_many_words", "too_many_fonts"};
        for (const auto& key : profile.attributes)
            profile.kinds[key] = RatingKind::binary;
    } else if (name == "gde") {
        profile.attributes = {"alignment", "overlap", "spacing"};
        for (const auto& key : profile.attributes)
            profile.kinds[key] = RatingKind::scale_1_10;
        profile.label_aliases["white_space"] = "spacing";
    } else {
        throw ValidationError("unknown profile \"" + name +
                              "\" (expected full, infographic, idd, afixa or gde)");
    }
    profile.validate();
    return profile;
}

// --- plan ---------------------------------------------------------------------------

std::vector<AttributeBucket> default_static_buckets() {
    return {
        {"typography",
         AgentKind::fixed,
         {"text_rendering_quality", "too_many_words", "too_many_fonts",
          "bad_typography_colors"}},
        {"layout",
         AgentKind::fixed,
         {"composition_and_layout", "alignment", "spacing", "overlap"}},
        {"color", AgentKind::fixed, {"color_harmony", "wrong_color_palettes"}},
    };
}

std::vector<AttributeBucket> ReviewPlan::all_buckets() const {
    std::vector<AttributeBucket> all = static_buckets;
    all.insert(all.end(), dynamic_buckets.begin(), dynamic_buckets.end());
    return all;
}

void ReviewPlan::validate() const {
    std::set<std::string> names;
    std::set<std::string> attrs;
    for (const auto& bucket : all_buckets()) {
        if (bucket.agent_name.empty())
            throw ValidationError("review plan buckets need names");
        if (!names.insert(bucket.agent_name).second)
            throw ValidationError("review plan repeats bucket name \"" +
                                  bucket.agent_name + "\"");
        if (bucket.attributes.empty())
            throw ValidationError("bucket \"" + bucket.agent_name + "\" is empty");
        for (const auto& key : bucket.attributes) {
            attribute_by_key(key);
            if (!attrs.insert(key).second)
                throw ValidationError("attribute \"" + key +
                                      "\" appears in more than one bucket");
        }
    }
}

void ReviewConfig::validate() const {
    profile.validate();
    if (max_dynamic_buckets < 0)
        throw ValidationError("max_dynamic_buckets cannot be negative");
    if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0))
        throw ValidationError("dedup_threshold must lie in (0, 1]");
    std::set<std::string> names;
    std::set<std::string> attrs;
    for (const auto& bucket : static_buckets) {
        if (bucket.agent_name.empty() || !names.insert(bucket.agent_name).second)
            throw ValidationError("static bucket names must be unique and non-empty");
        for (const auto& key : bucket.attributes) {
            attribute_by_key(key);
            if (!attrs.insert(key).second)
                throw ValidationError("attribute \"" + key +
                                      "\" appears in more than one static bucket");
        }
    }
    retrieval.validate();
}

namespace {

nlohmann::json plan_schema(int max_buckets) {
    return {
        {"type", "object"},
        {"required", {"buckets", "rationale"}},
        {"additionalProperties", false},
        {"properties",
         {{"rationale", {{"type", "string"}}},
          {"buckets",
           {{"type", "array"},
            {"maxItems", max_buckets},
            {"items",
             {{"type", "object"},
              {"required", {"name", "attributes"}},
              {"additionalProperties", false},
              {"properties",
               {{"name", {{"type", "string"}, {"minLength", 1}}},
                {"attributes",
                 {{"type", "array"},
                  {"minItems", 1},
                  {"items", {{"type", "string"}}}}}}}}}}}}},
    };
}

ChatRequest render_plan_prompt(const Design& design, const DesignDescription& description,
                               const std::vector<std::string>& covered,
                               const std::vector<std::string>& pool,
                               const ReviewConfig& cfg) {
    ChatRequest request;
    request.system_prompt =
        "You coordinate a team of graphic design reviewers. Decide which extra "
        "review dimensions deserve a dedicated reviewer for this particular "
        "design, and group them into focused buckets. Answer with JSON only.";
    request.response_schema = plan_schema(cfg.max_dynamic_buckets);
    request.user_parts.push_back(rendition_part(design));

    std::ostringstream text;
    text << "Design description:\n" << description.to_text() << "\n";
    text << "Core reviewers already cover: " << join(covered, ", ") << ".\n\n";
    text << "These dimensions still need owners:\n";
    for (const auto& key : pool) {
        const auto& attr = attribute_by_key(key);
        text << "- " << attr.key << " (" << attr.display_name << "): "
             << attr.description << "\n";
    }
    text << "\nGroup the dimensions that matter for this design into at most "
         << cfg.max_dynamic_buckets
         << " buckets of related concerns. Use each dimension at most once and "
            "only dimensions from the list. Return JSON with \"buckets\" (each "
            "{\"name\", \"attributes\"}) and a short \"rationale\".";
    request.user_parts.push_back(UserPart::make_text(text.str()));
    return request;
}

} // namespace

ReviewPlan plan_review(const Design& design, const DesignDescription& description,
                       const ReviewConfig& cfg, ChatClient& client,
                       std::vector<TraceEvent>* trace,
                       std::vector<std::string>* warnings) {
    cfg.validate();

    ReviewPlan plan;
    std::set<std::string> covered_set;
    std::vector<std::string> covered;
    for (const auto& bucket : cfg.static_buckets) {
        AttributeBucket kept;
        kept.agent_name = bucket.agent_name;
        kept.kind = AgentKind::fixed;
        for (const auto& key : bucket.attributes)
            if (cfg.profile.has(key)) {
                kept.attributes.push_back(key);
                covered_set.insert(key);
                covered.push_back(key);
            }
        if (!kept.attributes.empty())
            plan.static_buckets.push_back(std::move(kept));
    }

    std::vector<std::string> pool;
    for (const auto& key : cfg.profile.attributes)
        if (!covered_set.count(key)) pool.push_back(key);

    if (pool.empty() || cfg.max_dynamic_buckets == 0) {
        plan.rationale = "every rated dimension is covered by a core reviewer";
        record(trace, "planning", "planner", "static-only plan: " +
               std::to_string(plan.static_buckets.size()) + " buckets");
        plan.validate();
        return plan;
    }

    std::set<std::string> used_names;
    for (const auto& bucket : plan.static_buckets) used_names.insert(bucket.agent_name);
    std::set<std::string> assigned;

    try {
        const auto response =
            client.complete(render_plan_prompt(design, description, covered, pool, cfg));
        plan.rationale = response.parsed.at("rationale").get<std::string>();
        const std::set<std::string> pool_set(pool.begin(), pool.end());
        for (const auto& bj : response.parsed.at("buckets")) {
            AttributeBucket bucket;
            bucket.kind = AgentKind::dynamic;
            bucket.agent_name = bj.at("name").get<std::string>();
            for (const auto& kj : bj.at("attributes")) {
                const std::string key = kj.get<std::string>();
                if (!pool_set.count(key)) {
                    warn(warnings, "planner suggested \"" + key +
                                       "\" which is not open for dynamic review; dropped");
                    continue;
                }
                if (assigned.count(key)) {
                    warn(warnings, "planner repeated \"" + key + "\"; kept first use");
                    continue;
                }
                assigned.insert(key);
                bucket.attributes.push_back(key);
            }
            if (bucket.attributes.empty()) {
                warn(warnings, "planner bucket \"" + bucket.agent_name +
                                   "\" had no usable dimensions; dropped");
                continue;
            }
            std::string base = bucket.agent_name;
            for (int suffix = 2; !used_names.insert(bucket.agent_name).second; ++suffix)
                bucket.agent_name = base + "_" + std::to_string(suffix);
            plan.dynamic_buckets.push_back(std::move(bucket));
        }
        record(trace, "planning", "planner",
               std::to_string(plan.dynamic_buckets.size()) + " dynamic buckets: " +
                   plan.rationale);
    } catch (const SchemaError& e) {
        // The planner never blocks a review: fold the whole remainder
        // into one bucket and move on.
        warn(warnings, std::string("planner output unusable (") + e.what() +
                           "); falling back to one dynamic bucket");
        AttributeBucket fallback;
        fallback.agent_name = "dynamic_review";
        fallback.kind = AgentKind::dynamic;
        fallback.attributes = pool;
        plan.dynamic_buckets = {std::move(fallback)};
        plan.rationale = "fallback plan: planner reply never validated";
        record(trace, "planning", "planner", "fallback: one dynamic bucket");
    }

    plan.validate();
    return plan;
}

// --- reviewer -------------------------------------------------------------------------

namespace {

nlohmann::json review_schema(const AttributeBucket& bucket, const DatasetProfile& profile) {
    nlohmann::json rating_props = nlohmann::json::object();
    for (const auto& key : bucket.attributes)
        rating_props[key] = {
            {"type", profile.kind_of(key) == RatingKind::binary ? "boolean" : "number"}};
    return {
        {"type", "object"},
        {"required", {"ratings", "feedback"}},
        {"additionalProperties", false},
        {"properties",
         {{"ratings",
           {{"type", "object"},
            {"required", bucket.attributes},
            {"properties", rating_props}}},
          {"feedback",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"required", {"attribute", "text", "severity"}},
              {"additionalProperties", false},
              {"properties",
               {{"attribute", {{"type", "string"}}},
                {"text", {{"type", "string"}, {"minLength", 1}}},
                {"severity", {{"enum", {"minor", "major", "critical"}}}}}}}}}}}},
    };
}

ChatRequest render_review_prompt(const Design& design,
                                 const DesignDescription& description,
                                 const std::vector<Design>& exemplars,
                                 const AttributeBucket& bucket,
                                 const ReviewConfig& cfg) {
    std::vector<std::string> labels;
    for (const auto& key : bucket.attributes)
        labels.push_back(attribute_by_key(key).display_name);

    ChatRequest request;
    request.system_prompt =
        "You are a graphic design reviewer specializing in " + join(labels, ", ") +
        ". Judge only those dimensions, grounding every point in what the "
        "attached design actually shows. Answer with JSON only.";
    request.response_schema = review_schema(bucket, cfg.profile);

    request.user_parts.push_back(UserPart::make_text("Design under review:"));
    request.user_parts.push_back(rendition_part(design));
    request.user_parts.push_back(
        UserPart::make_text("Structured description:\n" + description.to_text()));

    for (std::size_t i = 0; i < exemplars.size(); ++i) {
        request.user_parts.push_back(UserPart::make_text(
            "Reference design " + std::to_string(i + 1) + " (id: " + exemplars[i].id +
            "), a comparable well-regarded piece:"));
        request.user_parts.push_back(rendition_part(exemplars[i]));
    }

    std::ostringstream text;
    text << "Rate the design under review on each dimension:\n";
    for (const auto& key : bucket.attributes)
        text << rating_instruction(attribute_by_key(key), cfg.profile.kind_of(key)) << "\n";
    text << "\nThen list concrete feedback items, each tied to one of your "
            "dimensions, as {\"attribute\", \"text\", \"severity\"} with severity "
            "minor, major or critical. Return JSON with \"ratings\" and "
            "\"feedback\".";
    request.user_parts.push_back(UserPart::make_text(text.str()));
    return request;
}

} // namespace

AgentVerdict review_bucket(const Design& design, const DesignDescription& description,
                           const std::vector<Design>& exemplars,
                           const AttributeBucket& bucket, const ReviewConfig& cfg,
                           ChatClient& client, std::vector<std::string>* warnings) {
    if (bucket.attributes.empty())
        throw ValidationError("cannot review an empty bucket");

    const auto response = client.complete(
        render_review_prompt(design, description, exemplars, bucket, cfg));

    AgentVerdict verdict;
    verdict.agent_name = bucket.agent_name;
    verdict.kind = bucket.kind;

    const std::set<std::string> allowed(bucket.attributes.begin(),
                                        bucket.attributes.end());
    for (const auto& [key, value] : response.parsed.at("ratings").items()) {
        if (!allowed.count(key)) {
            warn(warnings, "reviewer \"" + bucket.agent_name + "\" rated \"" + key +
                               "\" outside its bucket; dropped");
            continue;
        }
        if (cfg.profile.kind_of(key) == RatingKind::binary) {
            verdict.ratings[key] = value.get<bool>();
        } else {
            double score = value.get<double>();
            if (score < 1.0 || score > 10.0) {
                warn(warnings, "reviewer \"" + bucket.agent_name + "\" scored \"" + key +
                                   "\" outside 1-10; clamped");
                score = std::clamp(score, 1.0, 10.0);
            }
            verdict.ratings[key] = score;
        }
    }

    for (const auto& fj : response.parsed.at("feedback")) {
        FeedbackItem item;
        item.attribute = fj.at("attribute").get<std::string>();
        if (!allowed.count(item.attribute)) {
            warn(warnings, "reviewer \"" + bucket.agent_name +
                               "\" left feedback on \"" + item.attribute +
                               "\" outside its bucket; dropped");
            continue;
        }
        item.text = fj.at("text").get<std::string>();
        item.severity = severity_from_string(fj.at("severity").get<std::string>());
        item.agents = {bucket.agent_name};
        verdict.feedback.push_back(std::move(item));
    }
    return verdict;
}

// --- summary ---------------------------------------------------------------------------

namespace {

nlohmann::json summary_schema() {
    return {
        {"type", "object"},
        {"required", {"summary"}},
        {"additionalProperties", false},
        {"properties", {{"summary", {{"type", "string"}, {"minLength", 1}}}}},
    };
}

ChatRequest render_summary_prompt(const Design& design,
                                  const std::map<std::string, Rating>& ratings,
                                  const std::vector<FeedbackItem>& feedback) {
    ChatRequest request;
    request.system_prompt =
        "You write the closing summary of a design review. Weigh the ratings "
        "and feedback below into a short, direct paragraph for the designer. "
        "Answer with JSON only.";
    request.response_schema = summary_schema();

    std::ostringstream text;
    text << "Design \"" << design.id << "\" was rated:\n";
    for (const auto& [key, rating] : ratings)
        text << "- " << rating_text(key, rating) << "\n";
    if (!feedback.empty()) {
        text << "\nReviewer feedback:\n";
        for (const auto& item : feedback)
            text << "- [" << item.attribute << ", " << to_string(item.severity) << "] "
                 << item.text << "\n";
    }
    text << "\nReturn JSON {\"summary\": \"...\"}.";
    request.user_parts.push_back(UserPart::make_text(text.str()));
    return request;
}

} // namespace

ReviewReport summarize_review(const Design& design,
                              const std::vector<AgentVerdict>& verdicts,
                              const ReviewPlan& plan, const ReviewConfig& cfg,
                              ChatClient& client, EmbeddingProvider& embedder,
                              std::vector<TraceEvent>* trace,
                              std::vector<std::string>* warnings) {
    plan.validate();
    const auto buckets = plan.all_buckets();
    if (verdicts.size() != buckets.size())
        throw ValidationError("expected " + std::to_string(buckets.size()) +
                              " verdicts, got " + std::to_string(verdicts.size()));
    for (const auto& bucket : buckets) {
        const auto hits = std::count_if(
            verdicts.begin(), verdicts.end(),
            [&](const AgentVerdict& v) { return v.agent_name == bucket.agent_name; });
        if (hits != 1)
            throw ValidationError("bucket \"" + bucket.agent_name + "\" has " +
                                  std::to_string(hits) + " verdicts, expected exactly 1");
    }

    ReviewReport report;
    report.design_id = design.id;
    report.plan = plan;

    for (const auto& verdict : verdicts)
        for (const auto& [key, rating] : verdict.ratings)
            if (!report.ratings.emplace(key, rating).second)
                throw Error("attribute \"" + key + "\" rated by two reviewers");

    // Fold near-duplicate feedback: same attribute and nearly identical
    // wording collapse into the stronger item, crediting every
    // contributor.
    std::map<std::string, Embedding> embedded;
    auto embed_cached = [&](const std::string& text) -> const Embedding& {
        auto it = embedded.find(text);
        if (it == embedded.end())
            it = embedded.emplace(text, embedder.embed_text(text)).first;
        return it->second;
    };
    for (const auto& verdict : verdicts) {
        for (const auto& item : verdict.feedback) {
            FeedbackItem* dup = nullptr;
            for (auto& kept : report.feedback) {
                if (kept.attribute != item.attribute) continue;
                if (cosine(embed_cached(kept.text), embed_cached(item.text)) >=
                    cfg.dedup_threshold) {
                    dup = &kept;
                    break;
                }
            }
            if (!dup) {
                report.feedback.push_back(item);
                continue;
            }
            if (static_cast<int>(item.severity) > static_cast<int>(dup->severity)) {
                dup->severity = item.severity;
                dup->text = item.text;
            }
            for (const auto& agent : item.agents)
                if (std::find(dup->agents.begin(), dup->agents.end(), agent) ==
                    dup->agents.end())
                    dup->agents.push_back(agent);
            std::sort(dup->agents.begin(), dup->agents.end());
        }
    }

    try {
        const auto response = client.complete(
            render_summary_prompt(design, report.ratings, report.feedback));
        report.summary = response.parsed.at("summary").get<std::string>();
        record(trace, "summarizing", "summarizer", "summary ready");
    } catch (const ProviderError& e) {
        // A lost summary should not sink the whole review.
        warn(warnings, std::string("summary generation failed: ") + e.what());
        record(trace, "summarizing", "summarizer", "summary unavailable");
    }
    return report;
}

nlohmann::json ReviewReport::to_json() const {
    nlohmann::json doc;
    doc["design_id"] = design_id;
    doc["ratings"] = nlohmann::json::object();
    for (const auto& [key, rating] : ratings) doc["ratings"][key] = rating_to_json(rating);
    doc["feedback"] = nlohmann::json::array();
    for (const auto& item : feedback)
        doc["feedback"].push_back({{"attribute", item.attribute},
                                   {"text", item.text},
                                   {"severity", to_string(item.severity)},
                                   {"agents", item.agents}});
    doc["summary"] = summary;
    auto bucket_json = [](const AttributeBucket& bucket) {
        return nlohmann::json{{"name", bucket.agent_name},
                              {"attributes", bucket.attributes}};
    };
    doc["plan"] = {{"static", nlohmann::json::array()},
                   {"dynamic", nlohmann::json::array()},
                   {"rationale", plan.rationale}};
    for (const auto& bucket : plan.static_buckets)
        doc["plan"]["static"].push_back(bucket_json(bucket));
    for (const auto& bucket : plan.dynamic_buckets)
        doc["plan"]["dynamic"].push_back(bucket_json(bucket));
    doc["exemplars"] = exemplar_ids;
    doc["trace"] = nlohmann::json::array();
    for (const auto& event : trace)
        doc["trace"].push_back(
            {{"phase", event.phase}, {"agent", event.agent}, {"detail", event.detail}});
    doc["warnings"] = warnings;
    return doc;
}

// --- pipeline -----------------------------------------------------------------------------

ReviewReport run_review_pipeline(const Design& design, const DesignLibrary& library,
                                 const ReviewConfig& cfg, EmbeddingProvider& embedder,
                                 ChatClient& client) {
    // Precondition failures should read as input errors, not pipeline
    // deaths, so validate before the phase machinery starts.
    cfg.validate();
    design.validate();

    std::vector<TraceEvent> trace;
    std::vector<std::string> warnings;
    std::string phase = "planning";

    try {
        std::vector<Design> exemplars;
        std::vector<std::string> exemplar_ids;
        if (library.empty()) {
            record(&trace, "planning", "retrieval",
                   "skipped: the reference library is empty");
        } else {
            const auto retrieved = select_top_k(design, library, embedder, cfg.retrieval);
            for (const auto& s : retrieved.skipped)
                warnings.push_back("reference \"" + s.design_id +
                                   "\" skipped during retrieval: " + s.reason);
            for (const auto& scored : retrieved.ranked) {
                exemplar_ids.push_back(scored.design_id);
                exemplars.push_back(library.entries[scored.library_index]);
            }
            record(&trace, "planning", "retrieval",
                   "selected " + std::to_string(exemplar_ids.size()) +
                       " references: " + join(exemplar_ids, ", "));
        }

        const auto description = generate_description(design, client, cfg.sdd, &warnings);
        record(&trace, "planning", "describer", "structured description ready");

        const auto plan = plan_review(design, description, cfg, client, &trace, &warnings);

        phase = "reviewing";
        std::vector<AgentVerdict> verdicts;
        for (const auto& bucket : plan.all_buckets()) {
            verdicts.push_back(
                review_bucket(design, description, exemplars, bucket, cfg, client,
                              &warnings));
            record(&trace, "reviewing", bucket.agent_name,
                   std::to_string(verdicts.back().ratings.size()) + " ratings, " +
                       std::to_string(verdicts.back().feedback.size()) +
                       " feedback items");
        }

        phase = "summarizing";
        ReviewReport report = summarize_review(design, verdicts, plan, cfg, client,
                                               embedder, &trace, &warnings);
        report.exemplar_ids = std::move(exemplar_ids);
        report.trace = std::move(trace);
        report.warnings = std::move(warnings);
        return report;
    } catch (const PipelineError&) {
        throw;
    } catch (const ValidationError& e) {
        throw PipelineError("review pipeline failed while " + phase + ": " + e.what(),
                            phase, FailureKind::validation, std::move(trace));
    } catch (const ProviderError& e) {
        throw PipelineError("review pipeline failed while " + phase + ": " + e.what(),
                            phase, FailureKind::provider, std::move(trace));
    } catch (const Error& e) {
        throw PipelineError("review pipeline failed while " + phase + ": " + e.what(),
                            phase, FailureKind::internal, std::move(trace));
    }
}

} // namespace drs
