#include "mnemo/types.hpp"

#include <cmath>

#include "mnemo/errors.hpp"

namespace mnemo {

namespace {

const char* const kCategoryNames[kCategoryCount] = {
    "personal_details", "professional", "health",    "emotional", "preferences",
    "relationships",    "hobbies",      "education", "finance",   "travel",
    "goals",            "habits",       "beliefs",   "events",    "misc",
};

}  // namespace

const char* to_string(Category c) {
    return kCategoryNames[static_cast<int>(c)];
}

std::optional<Category> category_from_string(const std::string& s) {
    for (int i = 0; i < kCategoryCount; ++i)
        if (s == kCategoryNames[i]) return static_cast<Category>(i);
    return std::nullopt;
}

const char* to_string(Scope s) {
    return s == Scope::user ? "USER" : "CONTEXT";
}

std::optional<Scope> scope_from_string(const std::string& s) {
    if (s == "USER") return Scope::user;
    if (s == "CONTEXT") return Scope::context;
    return std::nullopt;
}

const char* to_string(MemoryStatus s) {
    switch (s) {
        case MemoryStatus::active: return "active";
        case MemoryStatus::historical: return "historical";
        case MemoryStatus::deleted: return "deleted";
    }
    return "active";
}

std::optional<MemoryStatus> status_from_string(const std::string& s) {
    if (s == "active") return MemoryStatus::active;
    if (s == "historical") return MemoryStatus::historical;
    if (s == "deleted") return MemoryStatus::deleted;
    return std::nullopt;
}

const char* to_string(TemporalClass c) {
    switch (c) {
        case TemporalClass::explicit_date: return "explicit_date";
        case TemporalClass::day_relative: return "day_relative";
        case TemporalClass::last_week: return "last_week";
        case TemporalClass::last_month: return "last_month";
        case TemporalClass::last_year: return "last_year";
        case TemporalClass::generic: return "generic";
    }
    return "generic";
}

void FusionConfig::validate() const {
    if (k_rrf < 1) throw ConfigError("fusion: k_rrf must be >= 1");
    if (w_vector < 0.0 || w_bm25 < 0.0) throw ConfigError("fusion: weights must be non-negative");
    if (std::abs(w_vector + w_bm25 - 1.0) > 1e-9)
        throw ConfigError("fusion: w_vector + w_bm25 must equal 1");
    if (candidate_depth < 1) throw ConfigError("fusion: candidate_depth must be >= 1");
    if (shortlist_size < 1) throw ConfigError("fusion: shortlist_size must be >= 1");
    if (rerank_top_n < 0) throw ConfigError("fusion: rerank_top_n must be >= 0");
    if (dedup_threshold <= 0.0 || dedup_threshold > 1.0)
        throw ConfigError("fusion: dedup_threshold must be in (0, 1]");
}

void TemporalConfig::validate() const {
    if (w_fused < 0.0 || w_temporal < 0.0) throw ConfigError("temporal: weights must be non-negative");
    if (std::abs(w_fused + w_temporal - 1.0) > 1e-9)
        throw ConfigError("temporal: w_fused + w_temporal must equal 1");
    if (floor <= 0.0 || floor >= 1.0) throw ConfigError("temporal: floor must be in (0, 1)");
    for (int i = 0; i < 6; ++i) {
        auto it = window_table.find(static_cast<TemporalClass>(i));
        if (it == window_table.end())
            throw ConfigError("temporal: window_table missing an intent class");
        if (it->second <= 0.0) throw ConfigError("temporal: window_days must be positive");
    }
}

}  // namespace mnemo
