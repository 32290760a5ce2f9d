#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace drs {

// One piece of a user message: either text or an attached image.
struct UserPart {
    enum class Kind { text, image };

    Kind kind = Kind::text;
    std::string text;                    // kind == text
    std::vector<std::uint8_t> image_bytes; // kind == image, encoded file bytes
    std::string image_mime = "image/png";

    static UserPart make_text(std::string t);
    static UserPart make_image(std::vector<std::uint8_t> bytes,
                               std::string mime = "image/png");
};

struct ChatRequest {
    std::string system_prompt;
    std::vector<UserPart> user_parts;   // at least one
    nlohmann::json response_schema;     // enforced with repair retries
    double temperature = 0.0;
    int max_tokens = 2048;

    void validate() const;

    // Stable identity of the prompt content (system text, user texts,
    // image bytes) used to address scripted replies.  Sampling
    // parameters and the schema are deliberately excluded.
    std::uint64_t fingerprint() const;
    std::string fingerprint_hex() const;
};

struct ProviderMeta {
    std::string model_id;
    double latency_ms = 0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    int repair_retries = 0; // resends needed before the reply validated
};

struct ChatResponse {
    std::string raw_text;
    nlohmann::json parsed;
    ProviderMeta meta;
};

// A structured-reply model backend.  complete() parses the reply as
// JSON and checks it against the request schema; an invalid reply is
// resent with the violation appended, up to two repair rounds, after
// which SchemaError (carrying the raw text) is thrown.  Transport
// failures surface as ProviderError.
class ChatClient {
public:
    virtual ~ChatClient() = default;

    ChatResponse complete(const ChatRequest& request);
    virtual std::string name() const = 0;

    // Sampling parameters forced onto every request (config plumbing);
    // prompt content and fingerprints are unaffected.
    void set_sampling(double temperature, int max_tokens);

    static constexpr int kMaxRepairs = 2;

protected:
    // Returns the raw reply text for the original request; repair_notes
    // carry validation feedback from earlier rounds of this call.
    virtual std::string send_raw(const ChatRequest& request,
                                 const std::vector<std::string>& repair_notes,
                                 ProviderMeta& meta) = 0;

    // Called once per complete() before the first send.
    virtual void on_complete_started(const ChatRequest& request) { (void)request; }

private:
    bool has_sampling_override_ = false;
    double temperature_override_ = 0.0;
    int max_tokens_override_ = 0;
};

// Offline client answering from a scripted list of replies.  Script
// shape:
//   [ { "match": {"fingerprint": "<hex>"} | {"index": N} | {},
//       "reply": <json value or raw string>,
//       "fail_first": N? }, ... ]
// A call is answered by the first entry whose fingerprint matches,
// else the first whose index equals the call ordinal (counting
// complete() calls from 0), else the first unconditional entry.
// fail_first makes the entry return malformed text for its first N
// sends, exercising the repair path.
class MockChatClient : public ChatClient {
public:
    explicit MockChatClient(const nlohmann::json& script);
    static MockChatClient from_file(const std::filesystem::path& path);

    std::string name() const override { return "mock"; }

    // Every request seen, in order; lets tests assert prompt content.
    const std::vector<ChatRequest>& requests() const { return requests_; }
    int calls() const { return call_index_; }

protected:
    std::string send_raw(const ChatRequest& request,
                         const std::vector<std::string>& repair_notes,
                         ProviderMeta& meta) override;
    void on_complete_started(const ChatRequest& request) override;

private:
    struct Entry {
        enum class Match { fingerprint, index, any };
        Match match = Match::any;
        std::string fingerprint;
        int index = -1;
        std::string reply;
        int failures_left = 0;
    };

    std::vector<Entry> entries_;
    std::vector<ChatRequest> requests_;
    int call_index_ = -1; // ordinal of the complete() call in flight
};

struct HttpChatConfig {
    std::string endpoint; // e.g. "http://127.0.0.1:8000"
    std::string model;
    std::string api_key_env = "DRS_API_KEY";
    int timeout_ms = 60000;
    int max_retries = 3;
};

// Client for a JSON chat-completions HTTP API; images travel as
// base64 data URIs.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(HttpChatConfig cfg);
    ~HttpChatClient() override;

    std::string name() const override { return "http:" + cfg_.model; }

protected:
    std::string send_raw(const ChatRequest& request,
                         const std::vector<std::string>& repair_notes,
                         ProviderMeta& meta) override;

private:
    HttpChatConfig cfg_;
    struct Http;
    std::unique_ptr<Http> http_;
};

} // namespace drs
