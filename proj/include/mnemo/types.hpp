#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mnemo/time.hpp"

namespace mnemo {

enum class Category {
    personal_details,
    professional,
    health,
    emotional,
    preferences,
    relationships,
    hobbies,
    education,
    finance,
    travel,
    goals,
    habits,
    beliefs,
    events,
    misc,
};

constexpr int kCategoryCount = 15;

const char* to_string(Category c);
std::optional<Category> category_from_string(const std::string& s);

enum class Scope { user, context };

const char* to_string(Scope s);
std::optional<Scope> scope_from_string(const std::string& s);

enum class MemoryStatus { active, historical, deleted };

const char* to_string(MemoryStatus s);
std::optional<MemoryStatus> status_from_string(const std::string& s);

// One extracted fact. Records are never destroyed: UPDATE supersedes, DELETE
// tombstones. A version chain is linked through replaces_id.
struct MemoryRecord {
    std::string id;
    std::string owner_id;
    std::string content;
    Category category = Category::misc;
    Scope scope = Scope::user;
    std::optional<std::string> session_id;
    int version = 1;
    std::optional<std::string> replaces_id;
    bool is_current = true;
    MemoryStatus status = MemoryStatus::active;
    std::optional<UtcSeconds> event_time;  // when the fact happened, if stated
    UtcSeconds created_at{};
};

// One raw conversation message as ingested.
struct MessageRecord {
    std::string id;
    std::string owner_id;
    std::string session_id;
    std::string speaker;
    std::string text;
    UtcSeconds timestamp{};
    bool processed = false;
};

struct FusionConfig {
    int k_rrf = 10;
    double w_vector = 0.70;
    double w_bm25 = 0.30;
    int candidate_depth = 50;  // hits fetched per modality before fusion
    int shortlist_size = 200;
    int rerank_top_n = 50;
    double dedup_threshold = 0.99;

    void validate() const;  // throws ConfigError
};

enum class TemporalClass {
    explicit_date,  // ISO dates, "on May 8th", "last Tuesday"
    day_relative,   // yesterday / today / tomorrow
    last_week,
    last_month,
    last_year,
    generic,  // bare temporal wording, "N days ago", ...
};

const char* to_string(TemporalClass c);

struct TemporalConfig {
    double w_fused = 0.60;
    double w_temporal = 0.40;
    double floor = 0.1;
    std::map<TemporalClass, double> window_table = {
        {TemporalClass::explicit_date, 3.0}, {TemporalClass::day_relative, 2.0},
        {TemporalClass::last_week, 10.0},    {TemporalClass::last_month, 35.0},
        {TemporalClass::last_year, 370.0},   {TemporalClass::generic, 30.0},
    };

    void validate() const;  // throws ConfigError
};

struct QueryAnalysis {
    bool temporal_intent = false;
    bool include_historical = false;
    std::optional<UtcDays> reference_date;  // set iff temporal_intent
    std::optional<double> window_days;      // set iff temporal_intent
    std::optional<TemporalClass> temporal_class;
};

// One search hit as it moves through the ranking pipeline. Record fields are a
// snapshot taken at retrieval time.
struct ScoredHit {
    std::string memory_id;
    std::string content;
    std::optional<int> rank_vector;  // 1-based rank in the vector candidate list
    std::optional<int> rank_bm25;    // 1-based rank in the lexical candidate list
    double score_fused = 0.0;
    std::optional<double> temporal_score;
    double score_final = 0.0;
    std::optional<double> rerank_score;

    Category category = Category::misc;
    Scope scope = Scope::user;
    int version = 1;
    std::optional<std::string> replaces_id;
    bool is_current = true;
    MemoryStatus status = MemoryStatus::active;
    std::optional<UtcSeconds> event_time;
    UtcSeconds created_at{};
};

struct StageTimings {
    std::int64_t analyze_us = 0;
    std::int64_t embed_us = 0;
    std::int64_t vector_us = 0;
    std::int64_t lexical_us = 0;
    std::int64_t fuse_us = 0;
    std::int64_t rerank_us = 0;
    std::int64_t total_us = 0;
};

struct SearchResult {
    std::vector<ScoredHit> hits;
    QueryAnalysis analysis;
    bool reranker_degraded = false;  // reranker failed; fused order kept
    std::optional<StageTimings> timings;
};

}  // namespace mnemo
