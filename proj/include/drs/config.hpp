#pragma once

#include "drs/bench.hpp"
#include "drs/chat.hpp"
#include "drs/embedding.hpp"
#include "drs/review.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace drs {

struct EmbeddingSection {
    std::string provider = "mock"; // mock | remote
    int dim = 64;
    std::uint64_t seed = 0;
    RemoteEmbeddingConfig remote;
};

struct ChatSection {
    std::string provider = "mock"; // mock | http
    std::filesystem::path script_path; // scripted replies for the mock
    HttpChatConfig http;
    double temperature = 0.0;
    int max_tokens = 2048;
};

// Everything the engine needs, loadable from one JSON file.  Paths in
// the file resolve against the file's directory and must exist.
struct EngineConfig {
    EmbeddingSection embedding;
    ChatSection chat;
    ReviewConfig review;
    BenchConfig bench;
    std::filesystem::path sdd_template_path; // optional prompt overrides

    void validate() const;
    nlohmann::json to_json() const;

    static EngineConfig defaults();
    static EngineConfig from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir);
};

EngineConfig load_config(const std::filesystem::path& path);

struct Providers {
    std::unique_ptr<EmbeddingProvider> embedder;
    std::unique_ptr<ChatClient> chat;
};

// Instantiates the configured backends.
Providers make_providers(const EngineConfig& cfg);

} // namespace drs
