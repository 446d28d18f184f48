#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mnemo/embedding.hpp"
#include "mnemo/types.hpp"

namespace mnemo {

// Weighted reciprocal-rank fusion of two ranked id lists (best first):
//   contribution of a list = w / (k_rrf + rank), rank 1-based; ids absent from
//   a list contribute nothing for it. Result is sorted by fused score
//   descending, ties by ascending id. score_final is initialized to the fused
//   score so a pipeline without later stages is already consistent.
std::vector<ScoredHit> rrf_fuse(const std::vector<std::string>& vector_ranked,
                                const std::vector<std::string>& bm25_ranked,
                                const FusionConfig& cfg);

// max(floor, 1 - |event_time - reference_date_midnight| / window_days),
// distance in fractional days.
double temporal_score(UtcSeconds event_time, UtcDays reference_date, double window_days,
                      double floor);

// Recomputes score_final = w_fused * score_fused + w_temporal * temporal for
// every hit (effective time: event_time, else created_at) and re-sorts
// descending, ties by ascending id. Precondition: analysis.temporal_intent.
void apply_temporal_boost(std::vector<ScoredHit>& hits, const QueryAnalysis& analysis,
                          const TemporalConfig& cfg);

// Greedy near-duplicate pruning over hits already sorted best-first: walk in
// order, keep a hit unless its 768D cosine to an already-kept hit exceeds
// threshold. embedding_of must return a vector for every hit id.
void dedup_hits(std::vector<ScoredHit>& hits,
                const std::function<const Embedding768*(const std::string&)>& embedding_of,
                double threshold);

}  // namespace mnemo
