#include "drs/config.hpp"

#include "drs/errors.hpp"

#include <fstream>
#include <set>

namespace drs {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ValidationError(where + ": unknown config key \"" + it.key() + "\"");
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& value) {
    std::filesystem::path p = value;
    return p.is_absolute() ? p : base / p;
}

void require_exists(const std::filesystem::path& p, const std::string& what) {
    if (!std::filesystem::exists(p))
        throw ValidationError(what + " does not exist: " + p.string());
}

} // namespace

void EngineConfig::validate() const {
    if (embedding.provider != "mock" && embedding.provider != "remote")
        throw ValidationError("embedding.provider must be \"mock\" or \"remote\"");
    if (embedding.dim < 2)
        throw ValidationError("embedding.dim must be at least 2");
    if (embedding.provider == "remote" && embedding.remote.endpoint.empty())
        throw ValidationError("embedding.endpoint required for the remote provider");
    if (chat.provider != "mock" && chat.provider != "http")
        throw ValidationError("chat.provider must be \"mock\" or \"http\"");
    if (chat.provider == "http" && chat.http.endpoint.empty())
        throw ValidationError("chat.endpoint required for the http provider");
    if (!(chat.temperature >= 0.0 && chat.temperature <= 2.0))
        throw ValidationError("chat.temperature must lie in [0, 2]");
    if (chat.max_tokens < 1)
        throw ValidationError("chat.max_tokens must be at least 1");
    if (bench.repeats < 1)
        throw ValidationError("bench.repeats must be at least 1");
    review.validate();
}

EngineConfig EngineConfig::defaults() { return {}; }

EngineConfig EngineConfig::from_json(const json& doc,
                                     const std::filesystem::path& base_dir) {
    if (!doc.is_object())
        throw ValidationError("config must be a JSON object");
    reject_unknown_keys(doc, {"embedding", "chat", "retrieval", "review", "bench"},
                        "config");

    EngineConfig cfg;
    try {
        if (auto it = doc.find("embedding"); it != doc.end()) {
            reject_unknown_keys(*it,
                                {"provider", "dim", "seed", "endpoint", "model",
                                 "api_key_env", "timeout_ms"},
                                "embedding");
            cfg.embedding.provider = it->value("provider", cfg.embedding.provider);
            cfg.embedding.dim = it->value("dim", cfg.embedding.dim);
            cfg.embedding.seed = it->value("seed", cfg.embedding.seed);
            cfg.embedding.remote.endpoint =
                it->value("endpoint", cfg.embedding.remote.endpoint);
            cfg.embedding.remote.model = it->value("model", cfg.embedding.remote.model);
            cfg.embedding.remote.api_key_env =
                it->value("api_key_env", cfg.embedding.remote.api_key_env);
            cfg.embedding.remote.timeout_ms =
                it->value("timeout_ms", cfg.embedding.remote.timeout_ms);
        }
        if (auto it = doc.find("chat"); it != doc.end()) {
            reject_unknown_keys(*it,
                                {"provider", "script", "endpoint", "model",
                                 "api_key_env", "temperature", "max_tokens",
                                 "timeout_ms"},
                                "chat");
            cfg.chat.provider = it->value("provider", cfg.chat.provider);
            if (it->contains("script") && !(*it)["script"].get<std::string>().empty()) {
                cfg.chat.script_path = resolve(base_dir, (*it)["script"].get<std::string>());
                require_exists(cfg.chat.script_path, "chat.script");
            }
            cfg.chat.http.endpoint = it->value("endpoint", cfg.chat.http.endpoint);
            cfg.chat.http.model = it->value("model", cfg.chat.http.model);
            cfg.chat.http.api_key_env = it->value("api_key_env", cfg.chat.http.api_key_env);
            cfg.chat.temperature = it->value("temperature", cfg.chat.temperature);
            cfg.chat.max_tokens = it->value("max_tokens", cfg.chat.max_tokens);
            cfg.chat.http.timeout_ms = it->value("timeout_ms", cfg.chat.http.timeout_ms);
        }
        if (auto it = doc.find("retrieval"); it != doc.end()) {
            reject_unknown_keys(*it,
                                {"alpha", "k", "beta", "outer_iters", "inner_iters",
                                 "gw_outer_iters", "marginal_tol", "patch_grid"},
                                "retrieval");
            auto& r = cfg.review.retrieval;
            r.alpha = it->value("alpha", r.alpha);
            r.k = it->value("k", r.k);
            r.ot.beta = it->value("beta", r.ot.beta);
            r.ot.outer_iters = it->value("outer_iters", r.ot.outer_iters);
            r.ot.inner_iters = it->value("inner_iters", r.ot.inner_iters);
            r.ot.gw_outer_iters = it->value("gw_outer_iters", r.ot.gw_outer_iters);
            r.ot.marginal_tol = it->value("marginal_tol", r.ot.marginal_tol);
            if (auto g = it->find("patch_grid"); g != it->end()) {
                reject_unknown_keys(*g, {"rows", "cols"}, "retrieval.patch_grid");
                r.patch_grid.rows = g->value("rows", r.patch_grid.rows);
                r.patch_grid.cols = g->value("cols", r.patch_grid.cols);
            }
        }
        if (auto it = doc.find("review"); it != doc.end()) {
            reject_unknown_keys(*it,
                                {"profile", "max_dynamic_buckets", "dedup_threshold",
                                 "static_buckets", "sdd_templates"},
                                "review");
            if (it->contains("profile"))
                cfg.review.profile =
                    DatasetProfile::by_name((*it)["profile"].get<std::string>());
            cfg.review.max_dynamic_buckets =
                it->value("max_dynamic_buckets", cfg.review.max_dynamic_buckets);
            cfg.review.dedup_threshold =
                it->value("dedup_threshold", cfg.review.dedup_threshold);
            if (auto b = it->find("static_buckets"); b != it->end()) {
                if (!b->is_array())
                    throw ValidationError("review.static_buckets must be an array");
                cfg.review.static_buckets.clear();
                for (const auto& bj : *b) {
                    reject_unknown_keys(bj, {"name", "attributes"},
                                        "review.static_buckets");
                    AttributeBucket bucket;
                    bucket.agent_name = bj.at("name").get<std::string>();
                    bucket.kind = AgentKind::fixed;
                    for (const auto& a : bj.at("attributes"))
                        bucket.attributes.push_back(a.get<std::string>());
                    cfg.review.static_buckets.push_back(std::move(bucket));
                }
            }
            if (it->contains("sdd_templates") &&
                !(*it)["sdd_templates"].get<std::string>().empty()) {
                cfg.sdd_template_path =
                    resolve(base_dir, (*it)["sdd_templates"].get<std::string>());
                require_exists(cfg.sdd_template_path, "review.sdd_templates");
                std::ifstream in(cfg.sdd_template_path);
                json tj;
                try {
                    in >> tj;
                } catch (const json::exception& e) {
                    throw ValidationError("malformed template file " +
                                          cfg.sdd_template_path.string() + ": " + e.what());
                }
                reject_unknown_keys(tj, {"system", "layout_header", "nolayout_header"},
                                    "sdd templates");
                cfg.review.sdd.system = tj.value("system", cfg.review.sdd.system);
                cfg.review.sdd.layout_header =
                    tj.value("layout_header", cfg.review.sdd.layout_header);
                cfg.review.sdd.nolayout_header =
                    tj.value("nolayout_header", cfg.review.sdd.nolayout_header);
            }
        }
        if (auto it = doc.find("bench"); it != doc.end()) {
            reject_unknown_keys(*it, {"repeats", "use_judge"}, "bench");
            cfg.bench.repeats = it->value("repeats", cfg.bench.repeats);
            cfg.bench.use_judge = it->value("use_judge", cfg.bench.use_judge);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config value: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

nlohmann::json EngineConfig::to_json() const {
    json doc;
    doc["embedding"] = {{"provider", embedding.provider},
                        {"dim", embedding.dim},
                        {"seed", embedding.seed},
                        {"endpoint", embedding.remote.endpoint},
                        {"model", embedding.remote.model},
                        {"api_key_env", embedding.remote.api_key_env},
                        {"timeout_ms", embedding.remote.timeout_ms}};
    doc["chat"] = {{"provider", chat.provider},
                   {"script", chat.script_path.string()},
                   {"endpoint", chat.http.endpoint},
                   {"model", chat.http.model},
                   {"api_key_env", chat.http.api_key_env},
                   {"temperature", chat.temperature},
                   {"max_tokens", chat.max_tokens},
                   {"timeout_ms", chat.http.timeout_ms}};
    const auto& r = review.retrieval;
    doc["retrieval"] = {{"alpha", r.alpha},
                        {"k", r.k},
                        {"beta", r.ot.beta},
                        {"outer_iters", r.ot.outer_iters},
                        {"inner_iters", r.ot.inner_iters},
                        {"gw_outer_iters", r.ot.gw_outer_iters},
                        {"marginal_tol", r.ot.marginal_tol},
                        {"patch_grid", {{"rows", r.patch_grid.rows},
                                        {"cols", r.patch_grid.cols}}}};
    doc["review"] = {{"profile", review.profile.name},
                     {"max_dynamic_buckets", review.max_dynamic_buckets},
                     {"dedup_threshold", review.dedup_threshold},
                     {"sdd_templates", sdd_template_path.string()},
                     {"static_buckets", json::array()}};
    for (const auto& bucket : review.static_buckets)
        doc["review"]["static_buckets"].push_back(
            {{"name", bucket.agent_name}, {"attributes", bucket.attributes}});
    doc["bench"] = {{"repeats", bench.repeats}, {"use_judge", bench.use_judge}};
    return doc;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("malformed config " + path.string() + ": " + e.what());
    }
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return EngineConfig::from_json(doc, base);
}

Providers make_providers(const EngineConfig& cfg) {
    cfg.validate();
    Providers providers;
    if (cfg.embedding.provider == "mock")
        providers.embedder =
            std::make_unique<MockEmbeddingProvider>(cfg.embedding.dim, cfg.embedding.seed);
    else
        providers.embedder = std::make_unique<RemoteEmbeddingProvider>(cfg.embedding.remote);

    if (cfg.chat.provider == "mock") {
        if (cfg.chat.script_path.empty())
            providers.chat =
                std::make_unique<MockChatClient>(nlohmann::json::array());
        else
            providers.chat = std::make_unique<MockChatClient>(
                MockChatClient::from_file(cfg.chat.script_path));
    } else {
        providers.chat = std::make_unique<HttpChatClient>(cfg.chat.http);
    }
    providers.chat->set_sampling(cfg.chat.temperature, cfg.chat.max_tokens);
    return providers;
}

} // namespace drs
