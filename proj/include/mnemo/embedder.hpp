#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mnemo/embedding.hpp"

namespace mnemo {

enum class EmbedRole { document, query };

// Text -> unit 768D vector. Implementations must be deterministic functions
// of (text, role) unless deterministic() says otherwise.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding768 embed(const std::string& text, EmbedRole role) = 0;
    virtual std::vector<Embedding768> embed_batch(const std::vector<std::string>& texts,
                                                  EmbedRole role);
    virtual bool deterministic() const = 0;
};

// Deterministic hashed bag-of-tokens embedder. Each (role-prefixed) token maps
// to a fixed pseudo-random direction derived from splitmix64 over
// (seed, token, dim); the text embedding is the normalized token sum, so texts
// sharing tokens land close together. Stands in for a sentence-transformer in
// tests and offline runs.
class ReferenceEmbedder final : public Embedder {
public:
    explicit ReferenceEmbedder(std::uint64_t seed = 42) : seed_(seed) {}

    Embedding768 embed(const std::string& text, EmbedRole role) override;
    bool deterministic() const override { return true; }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

// POST {"texts": [...], "role": "document"|"query"} -> {"embeddings": [[768 x real], ...]}
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(std::string endpoint, int timeout_ms = 2000)
        : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

    Embedding768 embed(const std::string& text, EmbedRole role) override;
    std::vector<Embedding768> embed_batch(const std::vector<std::string>& texts,
                                          EmbedRole role) override;
    bool deterministic() const override { return false; }

private:
    std::string endpoint_;
    int timeout_ms_;
};

std::shared_ptr<Embedder> make_reference_embedder(std::uint64_t seed = 42);

}  // namespace mnemo
