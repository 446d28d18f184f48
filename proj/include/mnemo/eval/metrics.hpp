#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace mnemo::eval {

struct F1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Multiset token overlap (tokens: lowercase, punctuation stripped, whitespace
// split — the shared analyzer). Both sides empty -> all 1.0; exactly one side
// empty -> all 0.0.
F1 token_f1(const std::string& predicted, const std::string& gold);

// Clipped unigram precision times brevity penalty
// exp(min(0, 1 - |gold| / |pred|)). Same empty-input convention as token_f1.
double bleu1(const std::string& predicted, const std::string& gold);

struct RankMetrics {
    double hit_at_k = 0.0;
    double mrr = 0.0;
    double ndcg = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Binary-relevance metrics over the top min(k, |retrieved|) of a ranked id
// list. precision divides by k; ndcg uses gain 1 with 1/log2(rank+1) discount
// and an ideal of min(k, |relevant|) packed items. An empty relevant set
// yields all zeros.
RankMetrics rank_metrics(const std::vector<std::string>& retrieved,
                         const std::unordered_set<std::string>& relevant, std::size_t k);

}  // namespace mnemo::eval
