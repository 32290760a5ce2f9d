#pragma once

#include "drs/image.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace drs {

// Dense unit-norm feature vector.
struct Embedding {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }
    double norm() const;
};

// Cosine similarity; both vectors must be non-empty, same dimension.
double cosine(const Embedding& a, const Embedding& b);

// Row-major grid of per-tile embeddings.
struct PatchGrid {
    int rows = 0;
    int cols = 0;
    std::vector<Embedding> patches; // rows*cols entries

    const Embedding& at(int r, int c) const {
        return patches[static_cast<std::size_t>(r) * cols + c];
    }
};

// Backend that maps images and text into one shared feature space.
// Implementations must be deterministic for identical inputs and
// return unit-norm vectors of a fixed dimension.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual Embedding embed_image(const Image& image) = 0;
    virtual Embedding embed_text(const std::string& text) = 0;

    // Partitions the image into a rows x cols grid (remainder pixels
    // folded into the last row/column) and embeds each tile.  A 1x1
    // grid therefore equals embed_image on the whole raster.
    virtual PatchGrid embed_patches(const Image& image, int rows, int cols);

    virtual std::string name() const = 0;
};

// Deterministic offline provider.  Features are pseudo-random unit
// vectors seeded by a hash of the decoded pixel bytes (or the text),
// so identical content embeds identically, any content change moves
// the vector, and no network is involved.
class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(int dim = 64, std::uint64_t seed = 0);

    Embedding embed_image(const Image& image) override;
    Embedding embed_text(const std::string& text) override;
    std::string name() const override { return "mock"; }

private:
    Embedding from_hash(std::uint64_t content_hash) const;

    int dim_;
    std::uint64_t seed_;
};

struct RemoteEmbeddingConfig {
    std::string endpoint;       // e.g. "http://127.0.0.1:8080"
    std::string model;
    std::string api_key_env = "DRS_API_KEY";
    int timeout_ms = 30000;
    int max_retries = 3;
};

// Client for an embeddings HTTP API (POST /v1/embeddings, JSON in and
// out, images shipped as base64 PNG).  Transport failures retry with
// exponential backoff before surfacing as ProviderError.
class RemoteEmbeddingProvider : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig cfg);
    ~RemoteEmbeddingProvider() override;

    Embedding embed_image(const Image& image) override;
    Embedding embed_text(const std::string& text) override;
    std::string name() const override { return "remote:" + cfg_.model; }

private:
    Embedding request(const std::string& kind, const std::string& payload);

    RemoteEmbeddingConfig cfg_;
    struct Http;
    std::unique_ptr<Http> http_;
};

// Base64 helpers shared by the remote providers.
std::string base64_encode(const std::uint8_t* data, std::size_t len);
inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
    return base64_encode(data.data(), data.size());
}

} // namespace drs
