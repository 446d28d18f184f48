#include "mnemo/lexical_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "mnemo/errors.hpp"
#include "mnemo/text_analysis.hpp"

namespace mnemo {

LexicalIndex::Partition& LexicalIndex::partition(const std::string& owner_id) {
    {
        std::shared_lock lk(map_mtx_);
        auto it = partitions_.find(owner_id);
        if (it != partitions_.end()) return it->second;
    }
    std::unique_lock lk(map_mtx_);
    return partitions_[owner_id];
}

const LexicalIndex::Partition* LexicalIndex::find_partition(const std::string& owner_id) const {
    std::shared_lock lk(map_mtx_);
    auto it = partitions_.find(owner_id);
    return it == partitions_.end() ? nullptr : &it->second;
}

void LexicalIndex::index_document(const std::string& owner_id, const std::string& doc_id,
                                  const std::string& text, bool is_current) {
    Partition& part = partition(owner_id);

    auto old = part.docs.find(doc_id);
    if (old != part.docs.end()) {
        for (const auto& [term, _] : old->second.terms) {
            auto pit = part.postings.find(term);
            if (pit == part.postings.end()) continue;
            auto& vec = pit->second;
            vec.erase(std::remove_if(vec.begin(), vec.end(),
                                     [&](const Posting& p) { return p.doc_id == doc_id; }),
                      vec.end());
            if (vec.empty()) part.postings.erase(pit);
        }
        part.total_length -= old->second.length;
        part.docs.erase(old);
    }

    auto tokens = analyze_text(text);
    std::map<std::string, int> tf;  // ordered so posting layout is deterministic
    for (auto& t : tokens) ++tf[t];

    DocInfo info;
    info.length = int(tokens.size());
    info.is_current = is_current;
    info.terms.reserve(tf.size());
    for (const auto& [term, count] : tf) {
        info.terms.emplace_back(term, count);
        part.postings[term].push_back(Posting{doc_id, count, info.length});
    }
    part.total_length += info.length;
    part.docs.emplace(doc_id, std::move(info));
}

void LexicalIndex::set_current(const std::string& owner_id, const std::string& doc_id,
                               bool is_current) {
    Partition& part = partition(owner_id);
    auto it = part.docs.find(doc_id);
    if (it != part.docs.end()) it->second.is_current = is_current;
}

std::vector<std::pair<std::string, double>> LexicalIndex::search(const LexicalQuery& q) const {
    auto terms = analyze_unique(q.text);
    if (terms.empty()) throw EmptyQueryError("query has no indexable tokens: '" + q.text + "'");

    const Partition* part = find_partition(q.owner_id);
    if (!part || part->docs.empty()) return {};

    const double n_docs = double(part->docs.size());
    const double avgdl = double(part->total_length) / n_docs;

    std::unordered_map<std::string, double> scores;
    for (const auto& term : terms) {
        auto pit = part->postings.find(term);
        if (pit == part->postings.end()) continue;
        const auto& plist = pit->second;
        const double df = double(plist.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        for (const Posting& p : plist) {
            if (q.current_only && !part->docs.at(p.doc_id).is_current) continue;
            const double tf = double(p.term_frequency);
            const double dl = double(p.doc_length);
            double denom_dl = avgdl > 0.0 ? dl / avgdl : 0.0;
            const double norm = tf * (k1_ + 1.0) / (tf + k1_ * (1.0 - b_ + b_ * denom_dl));
            scores[p.doc_id] += idf * norm;
        }
    }

    std::vector<std::pair<std::string, double>> out(scores.begin(), scores.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (out.size() > q.limit) out.resize(q.limit);
    return out;
}

std::size_t LexicalIndex::doc_count(const std::string& owner_id) const {
    const Partition* part = find_partition(owner_id);
    return part ? part->docs.size() : 0;
}

}  // namespace mnemo
