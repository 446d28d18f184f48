#include "mnemo/embedder.hpp"

#include "mnemo/remote.hpp"
#include "mnemo/text_analysis.hpp"

namespace mnemo {

std::vector<Embedding768> Embedder::embed_batch(const std::vector<std::string>& texts,
                                                EmbedRole role) {
    std::vector<Embedding768> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t, role));
    return out;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Uniform in [-1, 1).
double to_signed_unit(std::uint64_t x) {
    return double(x >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

}  // namespace

Embedding768 ReferenceEmbedder::embed(const std::string& text, EmbedRole role) {
    const char* prefix = role == EmbedRole::document ? "search_document: " : "search_query: ";
    auto tokens = analyze_text(prefix + text);

    std::array<double, 768> acc{};
    for (const auto& tok : tokens) {
        std::uint64_t state = mix64(seed_ ^ fnv1a(tok));
        std::array<double, 768> dir;
        double sq = 0.0;
        for (std::size_t j = 0; j < 768; ++j) {
            dir[j] = to_signed_unit(mix64(state + j * kGolden));
            sq += dir[j] * dir[j];
        }
        double n = std::sqrt(sq);  // ~16 for 768 uniform dims; never near zero
        for (std::size_t j = 0; j < 768; ++j) acc[j] += dir[j] / n;
    }
    return Embedding768::normalized(acc);
}

Embedding768 RemoteEmbedder::embed(const std::string& text, EmbedRole role) {
    return embed_batch({text}, role).front();
}

std::vector<Embedding768> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts,
                                                      EmbedRole role) {
    nlohmann::json body{{"texts", texts},
                        {"role", role == EmbedRole::document ? "document" : "query"}};
    auto reply = post_json("embedder", endpoint_, body, timeout_ms_);
    if (!reply.contains("embeddings") || !reply["embeddings"].is_array() ||
        reply["embeddings"].size() != texts.size())
        throw RemoteError("embedder", "reply must carry one embedding per input text");
    std::vector<Embedding768> out;
    out.reserve(texts.size());
    for (const auto& arr : reply["embeddings"]) {
        if (!arr.is_array() || arr.size() != 768)
            throw RemoteError("embedder", "embeddings must be 768-dimensional arrays");
        std::vector<double> raw;
        raw.reserve(768);
        for (const auto& x : arr) {
            if (!x.is_number()) throw RemoteError("embedder", "embedding components must be numbers");
            raw.push_back(x.get<double>());
        }
        try {
            out.push_back(Embedding768::normalized(raw));
        } catch (const DegenerateVectorError& e) {
            throw RemoteError("embedder", std::string("degenerate embedding: ") + e.what());
        }
    }
    return out;
}

std::shared_ptr<Embedder> make_reference_embedder(std::uint64_t seed) {
    return std::make_shared<ReferenceEmbedder>(seed);
}

}  // namespace mnemo
