#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mnemo {

// Candidate = (memory_id, content). rescore returns one score per candidate,
// same order as the input; higher is better. Failures must surface as
// exceptions — the caller degrades to fused order.
class Reranker {
public:
    virtual ~Reranker() = default;
    virtual std::vector<double> rescore(const std::string& query,
                                        const std::vector<std::pair<std::string, std::string>>&
                                            candidates) = 0;
    virtual bool deterministic() const = 0;
};

// Neutral reranker: preserves the incoming order by scoring position i of n
// as (n - i) / n. Useful as a default and to test the plumbing.
class PassthroughReranker final : public Reranker {
public:
    std::vector<double> rescore(const std::string& query,
                                const std::vector<std::pair<std::string, std::string>>& candidates)
        override;
    bool deterministic() const override { return true; }
};

// POST {"query": ..., "documents": [...]} -> {"scores": [...]}.
class RemoteReranker final : public Reranker {
public:
    explicit RemoteReranker(std::string endpoint, int timeout_ms = 2000)
        : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

    std::vector<double> rescore(const std::string& query,
                                const std::vector<std::pair<std::string, std::string>>& candidates)
        override;
    bool deterministic() const override { return false; }

private:
    std::string endpoint_;
    int timeout_ms_;
};

}  // namespace mnemo
