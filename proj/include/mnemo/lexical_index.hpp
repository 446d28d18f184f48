#pragma once

#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mnemo/types.hpp"

namespace mnemo {

struct Posting {
    std::string doc_id;
    int term_frequency = 0;
    int doc_length = 0;  // analyzed-token count of the whole document
};

struct LexicalQuery {
    std::string text;
    std::string owner_id;
    bool current_only = true;
    std::size_t limit = 10;
};

// Okapi BM25 over per-owner partitions (k1 = 1.2, b = 0.75 unless overridden).
// OR semantics across the unique analyzed query terms:
//   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
//   score(d) = sum_t idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
// N and avgdl cover every document in the owner partition regardless of
// currency flags; the current_only filter only prunes results. Ties break by
// ascending doc_id.
//
// Not internally synchronized for same-owner writes; callers serialize writes
// per owner. Partition bookkeeping is guarded so distinct owners can proceed
// in parallel.
class LexicalIndex {
public:
    explicit LexicalIndex(double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {}

    // Insert or replace (re-analyze) a document.
    void index_document(const std::string& owner_id, const std::string& doc_id,
                        const std::string& text, bool is_current);

    // Flip the currency flag without re-indexing. Unknown ids are ignored.
    void set_current(const std::string& owner_id, const std::string& doc_id, bool is_current);

    // Throws EmptyQueryError when the query analyzes to zero tokens.
    std::vector<std::pair<std::string, double>> search(const LexicalQuery& q) const;

    std::size_t doc_count(const std::string& owner_id) const;

private:
    struct DocInfo {
        int length = 0;
        bool is_current = true;
        std::vector<std::pair<std::string, int>> terms;  // (term, tf) for removal
    };

    struct Partition {
        std::unordered_map<std::string, std::vector<Posting>> postings;
        std::unordered_map<std::string, DocInfo> docs;
        long long total_length = 0;
    };

    Partition& partition(const std::string& owner_id);
    const Partition* find_partition(const std::string& owner_id) const;

    double k1_;
    double b_;
    std::unordered_map<std::string, Partition> partitions_;
    mutable std::shared_mutex map_mtx_;
};

}  // namespace mnemo
