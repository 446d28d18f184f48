#include "mnemo/reranker.hpp"

#include "mnemo/errors.hpp"
#include "mnemo/remote.hpp"

namespace mnemo {

std::vector<double> PassthroughReranker::rescore(
    const std::string&, const std::vector<std::pair<std::string, std::string>>& candidates) {
    const double n = double(candidates.size());
    std::vector<double> out(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = (n - double(i)) / n;
    return out;
}

std::vector<double> RemoteReranker::rescore(
    const std::string& query, const std::vector<std::pair<std::string, std::string>>& candidates) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& [_, content] : candidates) docs.push_back(content);
    auto reply =
        post_json("reranker", endpoint_, {{"query", query}, {"documents", docs}}, timeout_ms_);
    if (!reply.contains("scores") || !reply["scores"].is_array() ||
        reply["scores"].size() != candidates.size())
        throw RemoteError("reranker", "reply must carry one score per document");
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& s : reply["scores"]) {
        if (!s.is_number()) throw RemoteError("reranker", "scores must be numbers");
        out.push_back(s.get<double>());
    }
    return out;
}

}  // namespace mnemo
