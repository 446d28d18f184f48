#include "mnemo/fusion.hpp"

#include <algorithm>
#include <unordered_map>

#include "mnemo/errors.hpp"

namespace mnemo {

namespace {

void sort_by_score_final(std::vector<ScoredHit>& hits) {
    std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score_final != b.score_final) return a.score_final > b.score_final;
        return a.memory_id < b.memory_id;
    });
}

}  // namespace

std::vector<ScoredHit> rrf_fuse(const std::vector<std::string>& vector_ranked,
                                const std::vector<std::string>& bm25_ranked,
                                const FusionConfig& cfg) {
    std::unordered_map<std::string, ScoredHit> by_id;
    auto take = [&](const std::vector<std::string>& ranked, bool is_vector) {
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            ScoredHit& h = by_id[ranked[i]];
            h.memory_id = ranked[i];
            int rank = int(i) + 1;
            double rrf = 1.0 / (double(cfg.k_rrf) + double(rank));
            if (is_vector) {
                h.rank_vector = rank;
                h.score_fused += cfg.w_vector * rrf;
            } else {
                h.rank_bm25 = rank;
                h.score_fused += cfg.w_bm25 * rrf;
            }
        }
    };
    take(vector_ranked, true);
    take(bm25_ranked, false);

    std::vector<ScoredHit> out;
    out.reserve(by_id.size());
    for (auto& [_, h] : by_id) {
        h.score_final = h.score_fused;
        out.push_back(std::move(h));
    }
    sort_by_score_final(out);
    return out;
}

double temporal_score(UtcSeconds event_time, UtcDays reference_date, double window_days,
                      double floor) {
    double dist = days_between(event_time, UtcSeconds(reference_date));
    if (dist < 0) dist = -dist;
    double s = 1.0 - dist / window_days;
    return s < floor ? floor : s;
}

void apply_temporal_boost(std::vector<ScoredHit>& hits, const QueryAnalysis& analysis,
                          const TemporalConfig& cfg) {
    if (!analysis.temporal_intent || !analysis.reference_date || !analysis.window_days)
        throw Error("apply_temporal_boost requires a resolved temporal query");
    for (ScoredHit& h : hits) {
        UtcSeconds effective = h.event_time ? *h.event_time : h.created_at;
        h.temporal_score =
            temporal_score(effective, *analysis.reference_date, *analysis.window_days, cfg.floor);
        h.score_final = cfg.w_fused * h.score_fused + cfg.w_temporal * *h.temporal_score;
    }
    sort_by_score_final(hits);
}

void dedup_hits(std::vector<ScoredHit>& hits,
                const std::function<const Embedding768*(const std::string&)>& embedding_of,
                double threshold) {
    std::vector<ScoredHit> kept;
    std::vector<const Embedding768*> kept_vecs;
    kept.reserve(hits.size());
    for (ScoredHit& h : hits) {
        const Embedding768* e = embedding_of(h.memory_id);
        if (!e) throw Error("dedup_hits: no embedding for hit " + h.memory_id);
        bool dup = false;
        for (const Embedding768* k : kept_vecs) {
            if (e->dot(*k) > threshold) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            kept.push_back(std::move(h));
            kept_vecs.push_back(e);
        }
    }
    hits = std::move(kept);
}

}  // namespace mnemo
