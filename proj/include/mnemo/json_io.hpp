#pragma once

#include <nlohmann/json.hpp>

#include "mnemo/embedding.hpp"
#include "mnemo/types.hpp"

namespace mnemo {

// Wire/journal serialization. Optionals map to JSON null; timestamps are
// "YYYY-MM-DDTHH:MM:SSZ", event_time dates included.

nlohmann::json to_json(const MemoryRecord& rec);
MemoryRecord memory_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MessageRecord& rec);
MessageRecord message_from_json(const nlohmann::json& j);

// include_version_info adds version / replaces_id / status (used for
// history-intent search responses).
nlohmann::json to_json(const ScoredHit& hit, bool include_version_info);

nlohmann::json to_json(const QueryAnalysis& a);
nlohmann::json to_json(const StageTimings& t);

// Exact component copy — no renormalization, so journaled vectors replay
// bit-identically.
template <std::size_t N>
nlohmann::json embedding_to_json(const Embedding<N>& e) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : e.v) arr.push_back(x);
    return arr;
}

template <std::size_t N>
Embedding<N> embedding_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != N) throw DegenerateVectorError("bad embedding payload");
    Embedding<N> e;
    for (std::size_t i = 0; i < N; ++i) e.v[i] = j[i].get<double>();
    return e;
}

}  // namespace mnemo
