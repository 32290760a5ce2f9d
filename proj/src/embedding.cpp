#include "drs/embedding.hpp"

#include "drs/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
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

std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
    return fnv1a(h, &v, sizeof(v));
}

// Counter-based generator with well-understood mixing; fully specified
// here so the mock stream never depends on library internals.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    // 53 mantissa bits, shifted into (0, 1] so log() below stays finite.
    return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1p-53;
}

} // namespace

double Embedding::norm() const {
    double s = 0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.values.empty() || b.values.empty())
        throw ValidationError("cosine requires non-empty embeddings");
    if (a.dim() != b.dim())
        throw ValidationError("cosine dimension mismatch: " + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()));
    double dot = 0, na = 0, nb = 0;
    for (int i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0 || nb == 0)
        throw ValidationError("cosine undefined for a zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

PatchGrid EmbeddingProvider::embed_patches(const Image& image, int rows, int cols) {
    if (rows < 1 || cols < 1)
        throw ValidationError("patch grid must be at least 1x1");
    if (image.width < cols || image.height < rows)
        throw ValidationError("image " + std::to_string(image.width) + "x" +
                              std::to_string(image.height) + " too small for a " +
                              std::to_string(rows) + "x" + std::to_string(cols) +
                              " patch grid");
    PatchGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.patches.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            grid.patches.push_back(embed_image(tile(image, r, c, rows, cols)));
    return grid;
}

MockEmbeddingProvider::MockEmbeddingProvider(int dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim < 2)
        throw ValidationError("embedding dimension must be at least 2");
}

Embedding MockEmbeddingProvider::from_hash(std::uint64_t content_hash) const {
    std::uint64_t state = content_hash;
    Embedding e;
    e.values.resize(dim_);
    for (int i = 0; i < dim_; i += 2) {
        const double u1 = uniform01(state);
        const double u2 = uniform01(state);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        e.values[i] = radius * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < dim_)
            e.values[i + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
    }
    const double n = e.norm();
    if (n < 1e-12) {
        // Practically unreachable; recurse with a perturbed stream.
        return from_hash(content_hash + 0x6a09e667f3bcc909ULL);
    }
    for (double& v : e.values) v /= n;
    return e;
}

Embedding MockEmbeddingProvider::embed_image(const Image& image) {
    if (image.empty())
        throw ValidationError("cannot embed an empty image");
    std::uint64_t h = kFnvOffset;
    h = fnv1a(h, "image", 5);
    h = fnv1a_u64(h, seed_);
    h = fnv1a_u64(h, static_cast<std::uint64_t>(image.width));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(image.height));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(image.channels));
    h = fnv1a(h, image.pixels.data(), image.pixels.size());
    return from_hash(h);
}

Embedding MockEmbeddingProvider::embed_text(const std::string& text) {
    if (text.empty())
        throw ValidationError("cannot embed an empty string");
    std::uint64_t h = kFnvOffset;
    h = fnv1a(h, "text", 4);
    h = fnv1a_u64(h, seed_);
    h = fnv1a(h, text.data(), text.size());
    return from_hash(h);
}

// --- remote provider ---------------------------------------------------------

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
    static const char table[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= data[i + 2];
        out.push_back(table[(chunk >> 18) & 0x3f]);
        out.push_back(table[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < len ? table[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < len ? table[chunk & 0x3f] : '=');
    }
    return out;
}

struct RemoteEmbeddingProvider::Http {
    httplib::Client client;
    explicit Http(const std::string& endpoint) : client(endpoint) {}
};

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig cfg)
    : cfg_(std::move(cfg)), http_(std::make_unique<Http>(cfg_.endpoint)) {
    if (cfg_.endpoint.empty())
        throw ValidationError("remote embedding provider needs an endpoint");
    http_->client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
    http_->client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
        http_->client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
}

RemoteEmbeddingProvider::~RemoteEmbeddingProvider() = default;

Embedding RemoteEmbeddingProvider::request(const std::string& kind,
                                           const std::string& payload) {
    nlohmann::json body = {{"model", cfg_.model}, {"kind", kind}, {"data", payload}};
    const std::string body_str = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < cfg_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
        auto res = http_->client.Post("/v1/embeddings", body_str, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status) + ": " + res->body;
            if (res->status >= 400 && res->status < 500 && res->status != 429)
                break; // client errors will not heal on retry
            continue;
        }
        try {
            auto doc = nlohmann::json::parse(res->body);
            const auto& vec = doc.at("embedding");
            Embedding e;
            e.values.reserve(vec.size());
            for (const auto& v : vec) e.values.push_back(v.get<double>());
            if (e.values.empty())
                throw ProviderError("embedding endpoint returned an empty vector");
            const double n = e.norm();
            if (!(n > 0) || !std::isfinite(n))
                throw ProviderError("embedding endpoint returned a degenerate vector");
            for (double& v : e.values) v /= n;
            return e;
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed embedding response: ") + e.what();
        }
    }
    throw ProviderError("embedding request to " + cfg_.endpoint + " failed: " + last_error);
}

Embedding RemoteEmbeddingProvider::embed_image(const Image& image) {
    if (image.empty())
        throw ValidationError("cannot embed an empty image");
    return request("image", base64_encode(encode_png(image)));
}

Embedding RemoteEmbeddingProvider::embed_text(const std::string& text) {
    if (text.empty())
        throw ValidationError("cannot embed an empty string");
    return request("text", text);
}

} // namespace drs
