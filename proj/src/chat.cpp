#include "drs/chat.hpp"

#include "drs/embedding.hpp" // base64_encode
#include "drs/errors.hpp"
#include "drs/json_schema.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace drs {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

// Models often wrap JSON in markdown fences; accept that politely.
std::string strip_fences(const std::string& text) {
    auto first = text.find("```");
    if (first == std::string::npos) return text;
    auto line_end = text.find('\n', first);
    if (line_end == std::string::npos) return text;
    auto last = text.rfind("```");
    if (last <= line_end) return text;
    return text.substr(line_end + 1, last - line_end - 1);
}

} // namespace

UserPart UserPart::make_text(std::string t) {
    UserPart part;
    part.kind = Kind::text;
    part.text = std::move(t);
    return part;
}

UserPart UserPart::make_image(std::vector<std::uint8_t> bytes, std::string mime) {
    UserPart part;
    part.kind = Kind::image;
    part.image_bytes = std::move(bytes);
    part.image_mime = std::move(mime);
    return part;
}

void ChatRequest::validate() const {
    if (user_parts.empty())
        throw ValidationError("chat request needs at least one user part");
    if (!(temperature >= 0.0 && temperature <= 2.0))
        throw ValidationError("temperature must lie in [0, 2]");
    if (max_tokens < 1)
        throw ValidationError("max_tokens must be at least 1");
    for (const auto& part : user_parts)
        if (part.kind == UserPart::Kind::image && part.image_bytes.empty())
            throw ValidationError("image parts must carry bytes");
}

std::uint64_t ChatRequest::fingerprint() const {
    std::uint64_t h = kFnvOffset;
    h = fnv1a(h, "sys:", 4);
    h = fnv1a(h, system_prompt.data(), system_prompt.size());
    for (const auto& part : user_parts) {
        if (part.kind == UserPart::Kind::text) {
            h = fnv1a(h, "txt:", 4);
            h = fnv1a(h, part.text.data(), part.text.size());
        } else {
            h = fnv1a(h, "img:", 4);
            h = fnv1a(h, part.image_bytes.data(), part.image_bytes.size());
        }
    }
    return h;
}

std::string ChatRequest::fingerprint_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fingerprint()));
    return buf;
}

void ChatClient::set_sampling(double temperature, int max_tokens) {
    if (!(temperature >= 0.0 && temperature <= 2.0))
        throw ValidationError("temperature must lie in [0, 2]");
    if (max_tokens < 1)
        throw ValidationError("max_tokens must be at least 1");
    has_sampling_override_ = true;
    temperature_override_ = temperature;
    max_tokens_override_ = max_tokens;
}

ChatResponse ChatClient::complete(const ChatRequest& original) {
    ChatRequest request = original;
    if (has_sampling_override_) {
        request.temperature = temperature_override_;
        request.max_tokens = max_tokens_override_;
    }
    request.validate();
    on_complete_started(request);

    std::vector<std::string> notes;
    std::string raw;
    for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
        ProviderMeta meta;
        meta.model_id = name();
        raw = send_raw(request, notes, meta);

        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(strip_fences(raw));
        } catch (const nlohmann::json::exception& e) {
            notes.push_back(std::string("reply was not valid JSON: ") + e.what());
            continue;
        }
        auto violations = schema_violations(request.response_schema, parsed);
        if (!violations.empty()) {
            std::string note = "reply violated the expected shape:";
            for (const auto& v : violations) note += " " + v + ";";
            notes.push_back(std::move(note));
            continue;
        }
        meta.repair_retries = attempt;
        return {std::move(raw), std::move(parsed), std::move(meta)};
    }

    std::string msg = "model reply stayed invalid after " +
                      std::to_string(kMaxRepairs) + " repair attempts:";
    for (const auto& n : notes) msg += " " + n;
    throw SchemaError(msg, raw);
}

// --- mock client --------------------------------------------------------------

MockChatClient::MockChatClient(const nlohmann::json& script) {
    if (!script.is_array())
        throw ValidationError("chat script must be a JSON array");
    for (const auto& item : script) {
        if (!item.is_object() || !item.contains("reply"))
            throw ValidationError("each chat script entry needs a \"reply\"");
        Entry entry;
        if (auto m = item.find("match"); m != item.end() && !m->empty()) {
            if (m->contains("fingerprint")) {
                entry.match = Entry::Match::fingerprint;
                entry.fingerprint = (*m)["fingerprint"].get<std::string>();
            } else if (m->contains("index")) {
                entry.match = Entry::Match::index;
                entry.index = (*m)["index"].get<int>();
            } else {
                throw ValidationError(
                    "chat script match must name a fingerprint or an index");
            }
        }
        const auto& reply = item["reply"];
        entry.reply = reply.is_string() ? reply.get<std::string>() : reply.dump();
        if (auto f = item.find("fail_first"); f != item.end())
            entry.failures_left = f->get<int>();
        entries_.push_back(std::move(entry));
    }
}

MockChatClient MockChatClient::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open chat script " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed chat script " + path.string() + ": " + e.what());
    }
    return MockChatClient(doc);
}

void MockChatClient::on_complete_started(const ChatRequest& request) {
    ++call_index_;
    requests_.push_back(request);
}

std::string MockChatClient::send_raw(const ChatRequest& request,
                                     const std::vector<std::string>&,
                                     ProviderMeta& meta) {
    meta.model_id = "mock";
    const std::string fp = request.fingerprint_hex();

    Entry* hit = nullptr;
    for (auto& e : entries_)
        if (e.match == Entry::Match::fingerprint && e.fingerprint == fp) {
            hit = &e;
            break;
        }
    if (!hit)
        for (auto& e : entries_)
            if (e.match == Entry::Match::index && e.index == call_index_) {
                hit = &e;
                break;
            }
    if (!hit)
        for (auto& e : entries_)
            if (e.match == Entry::Match::any) {
                hit = &e;
                break;
            }
    if (!hit)
        throw ProviderError("no scripted reply for call #" +
                            std::to_string(call_index_) + " (fingerprint " + fp + ")");

    if (hit->failures_left > 0) {
        --hit->failures_left;
        return "this reply is deliberately not valid JSON {";
    }
    return hit->reply;
}

// --- http client ---------------------------------------------------------------

struct HttpChatClient::Http {
    httplib::Client client;
    explicit Http(const std::string& endpoint) : client(endpoint) {}
};

HttpChatClient::HttpChatClient(HttpChatConfig cfg)
    : cfg_(std::move(cfg)), http_(std::make_unique<Http>(cfg_.endpoint)) {
    if (cfg_.endpoint.empty())
        throw ValidationError("http chat client needs an endpoint");
    http_->client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
        http_->client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::send_raw(const ChatRequest& request,
                                     const std::vector<std::string>& repair_notes,
                                     ProviderMeta& meta) {
    nlohmann::json content = nlohmann::json::array();
    for (const auto& part : request.user_parts) {
        if (part.kind == UserPart::Kind::text) {
            content.push_back({{"type", "text"}, {"text", part.text}});
        } else {
            const std::string uri = "data:" + part.image_mime + ";base64," +
                                    base64_encode(part.image_bytes);
            content.push_back(
                {{"type", "image_url"}, {"image_url", {{"url", uri}}}});
        }
    }
    for (const auto& note : repair_notes)
        content.push_back(
            {{"type", "text"},
             {"text", "Your previous reply was rejected: " + note +
                          " Reply again with only the corrected JSON."}});

    nlohmann::json body = {
        {"model", cfg_.model},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"response_format", {{"type", "json_object"}}},
        {"messages",
         {{{"role", "system"}, {"content", request.system_prompt}},
          {{"role", "user"}, {"content", content}}}},
    };

    const auto start = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 0; attempt < cfg_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(200 << attempt));
        auto res = http_->client.Post("/v1/chat/completions", body.dump(),
                                      "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status) + ": " + res->body;
            if (res->status >= 400 && res->status < 500 && res->status != 429)
                break;
            continue;
        }
        try {
            auto doc = nlohmann::json::parse(res->body);
            meta.model_id = doc.value("model", cfg_.model);
            if (doc.contains("usage")) {
                meta.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
                meta.completion_tokens = doc["usage"].value("completion_tokens", 0);
            }
            meta.latency_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed completion response: ") + e.what();
        }
    }
    throw ProviderError("chat request to " + cfg_.endpoint + " failed: " + last_error);
}

} // namespace drs
