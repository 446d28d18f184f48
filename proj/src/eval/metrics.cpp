#include "mnemo/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mnemo/text_analysis.hpp"

namespace mnemo::eval {

namespace {

std::unordered_map<std::string, int> counts(const std::vector<std::string>& tokens) {
    std::unordered_map<std::string, int> c;
    for (const auto& t : tokens) ++c[t];
    return c;
}

int clipped_overlap(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    auto cg = counts(gold);
    auto cp = counts(pred);
    int overlap = 0;
    for (const auto& [tok, np] : cp) {
        auto it = cg.find(tok);
        if (it != cg.end()) overlap += std::min(np, it->second);
    }
    return overlap;
}

}  // namespace

F1 token_f1(const std::string& predicted, const std::string& gold) {
    auto tp = analyze_text(predicted);
    auto tg = analyze_text(gold);
    if (tp.empty() && tg.empty()) return {1.0, 1.0, 1.0};
    if (tp.empty() || tg.empty()) return {0.0, 0.0, 0.0};
    double overlap = clipped_overlap(tp, tg);
    double p = overlap / double(tp.size());
    double r = overlap / double(tg.size());
    double f = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    return {p, r, f};
}

double bleu1(const std::string& predicted, const std::string& gold) {
    auto tp = analyze_text(predicted);
    auto tg = analyze_text(gold);
    if (tp.empty() && tg.empty()) return 1.0;
    if (tp.empty() || tg.empty()) return 0.0;
    double precision = clipped_overlap(tp, tg) / double(tp.size());
    double bp = std::exp(std::min(0.0, 1.0 - double(tg.size()) / double(tp.size())));
    return precision * bp;
}

RankMetrics rank_metrics(const std::vector<std::string>& retrieved,
                         const std::unordered_set<std::string>& relevant, std::size_t k) {
    RankMetrics m;
    if (relevant.empty() || k == 0) return m;

    const std::size_t depth = std::min(k, retrieved.size());
    int hits = 0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < depth; ++i) {
        if (!relevant.count(retrieved[i])) continue;
        ++hits;
        double rank = double(i) + 1.0;
        if (m.mrr == 0.0) m.mrr = 1.0 / rank;
        dcg += 1.0 / std::log2(rank + 1.0);
    }
    m.hit_at_k = hits > 0 ? 1.0 : 0.0;
    double idcg = 0.0;
    const std::size_t ideal = std::min(k, relevant.size());
    for (std::size_t i = 1; i <= ideal; ++i) idcg += 1.0 / std::log2(double(i) + 1.0);
    m.ndcg = idcg > 0.0 ? dcg / idcg : 0.0;
    m.precision = double(hits) / double(k);
    m.recall = double(hits) / double(relevant.size());
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

}  // namespace mnemo::eval
