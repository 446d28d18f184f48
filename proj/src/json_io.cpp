#include "mnemo/json_io.hpp"

#include "mnemo/errors.hpp"

namespace mnemo {

namespace {

nlohmann::json opt_str(const std::optional<std::string>& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

std::optional<std::string> str_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

UtcSeconds require_time(const nlohmann::json& j, const char* key) {
    auto t = parse_iso8601(j.at(key).get<std::string>());
    if (!t) throw Error(std::string("bad timestamp in field ") + key);
    return *t;
}

}  // namespace

nlohmann::json to_json(const MemoryRecord& rec) {
    return {
        {"id", rec.id},
        {"owner_id", rec.owner_id},
        {"content", rec.content},
        {"category", to_string(rec.category)},
        {"scope", to_string(rec.scope)},
        {"session_id", opt_str(rec.session_id)},
        {"version", rec.version},
        {"replaces_id", opt_str(rec.replaces_id)},
        {"is_current", rec.is_current},
        {"status", to_string(rec.status)},
        {"event_time", rec.event_time ? nlohmann::json(format_iso8601(*rec.event_time))
                                      : nlohmann::json(nullptr)},
        {"created_at", format_iso8601(rec.created_at)},
    };
}

MemoryRecord memory_from_json(const nlohmann::json& j) {
    MemoryRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.owner_id = j.at("owner_id").get<std::string>();
    rec.content = j.at("content").get<std::string>();
    auto cat = category_from_string(j.at("category").get<std::string>());
    if (!cat) throw Error("unknown category " + j["category"].dump());
    rec.category = *cat;
    auto sc = scope_from_string(j.at("scope").get<std::string>());
    if (!sc) throw Error("unknown scope " + j["scope"].dump());
    rec.scope = *sc;
    rec.session_id = str_opt(j, "session_id");
    rec.version = j.at("version").get<int>();
    rec.replaces_id = str_opt(j, "replaces_id");
    rec.is_current = j.at("is_current").get<bool>();
    auto st = status_from_string(j.at("status").get<std::string>());
    if (!st) throw Error("unknown status " + j["status"].dump());
    rec.status = *st;
    if (j.contains("event_time") && !j["event_time"].is_null())
        rec.event_time = require_time(j, "event_time");
    rec.created_at = require_time(j, "created_at");
    return rec;
}

nlohmann::json to_json(const MessageRecord& rec) {
    return {
        {"id", rec.id},
        {"owner_id", rec.owner_id},
        {"session_id", rec.session_id},
        {"speaker", rec.speaker},
        {"text", rec.text},
        {"timestamp", format_iso8601(rec.timestamp)},
        {"processed", rec.processed},
    };
}

MessageRecord message_from_json(const nlohmann::json& j) {
    MessageRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.owner_id = j.at("owner_id").get<std::string>();
    rec.session_id = j.at("session_id").get<std::string>();
    rec.speaker = j.at("speaker").get<std::string>();
    rec.text = j.at("text").get<std::string>();
    rec.timestamp = require_time(j, "timestamp");
    rec.processed = j.at("processed").get<bool>();
    return rec;
}

nlohmann::json to_json(const ScoredHit& hit, bool include_version_info) {
    nlohmann::json j{
        {"memory_id", hit.memory_id},
        {"content", hit.content},
        {"category", to_string(hit.category)},
        {"score_final", hit.score_final},
        {"score_fused", hit.score_fused},
        {"rank_vector", hit.rank_vector ? nlohmann::json(*hit.rank_vector) : nlohmann::json(nullptr)},
        {"rank_bm25", hit.rank_bm25 ? nlohmann::json(*hit.rank_bm25) : nlohmann::json(nullptr)},
        {"temporal_score",
         hit.temporal_score ? nlohmann::json(*hit.temporal_score) : nlohmann::json(nullptr)},
        {"rerank_score",
         hit.rerank_score ? nlohmann::json(*hit.rerank_score) : nlohmann::json(nullptr)},
        {"event_time", hit.event_time ? nlohmann::json(format_iso8601(*hit.event_time))
                                      : nlohmann::json(nullptr)},
        {"created_at", format_iso8601(hit.created_at)},
    };
    if (include_version_info) {
        j["version"] = hit.version;
        j["replaces_id"] = opt_str(hit.replaces_id);
        j["status"] = to_string(hit.status);
    }
    return j;
}

nlohmann::json to_json(const QueryAnalysis& a) {
    nlohmann::json j{
        {"temporal_intent", a.temporal_intent},
        {"include_historical", a.include_historical},
    };
    j["reference_date"] =
        a.reference_date ? nlohmann::json(format_date(*a.reference_date)) : nlohmann::json(nullptr);
    j["window_days"] = a.window_days ? nlohmann::json(*a.window_days) : nlohmann::json(nullptr);
    j["temporal_class"] =
        a.temporal_class ? nlohmann::json(to_string(*a.temporal_class)) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const StageTimings& t) {
    return {
        {"analyze_us", t.analyze_us}, {"embed_us", t.embed_us}, {"vector_us", t.vector_us},
        {"lexical_us", t.lexical_us}, {"fuse_us", t.fuse_us},   {"rerank_us", t.rerank_us},
        {"total_us", t.total_us},
    };
}

}  // namespace mnemo
