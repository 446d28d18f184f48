#pragma once

#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mnemo/embedding.hpp"

namespace mnemo {

struct VectorFilter {
    std::string owner_id;
    bool current_only = true;
};

// Dual-dimension vector store with per-owner buckets:
//   - memory vectors are kept at 768D (accurate) and 256D (fast, derived by
//     Matryoshka truncation of the same vector)
//   - raw messages live in a separate 256D immediate-recall collection
// Search is exhaustive cosine over unit vectors; ties break by ascending id.
// Same synchronization contract as LexicalIndex: writes are serialized per
// owner by the caller, bucket bookkeeping is guarded internally.
class MatryoshkaStore {
public:
    // Insert or replace a memory vector; the 256D twin is derived internally.
    void upsert_memory(const std::string& owner_id, const std::string& memory_id,
                       const Embedding768& e768, bool is_current);

    // Flip payload currency without touching vectors. Unknown ids are ignored.
    void set_memory_current(const std::string& owner_id, const std::string& memory_id,
                            bool is_current);

    // Single-stage exhaustive searches.
    std::vector<std::pair<std::string, double>> search_accurate(const Embedding768& q,
                                                                const VectorFilter& f,
                                                                std::size_t k) const;
    std::vector<std::pair<std::string, double>> search_fast(const Embedding256& q,
                                                            const VectorFilter& f,
                                                            std::size_t k) const;

    // 256D shortlist -> 768D re-score -> top k. The query is truncated with
    // the same transform as stored vectors for stage one.
    std::vector<std::pair<std::string, double>> two_stage_search(const Embedding768& q,
                                                                 const VectorFilter& f,
                                                                 std::size_t k,
                                                                 std::size_t shortlist) const;

    const Embedding768* find_memory(const std::string& owner_id,
                                    const std::string& memory_id) const;
    std::size_t memory_count(const std::string& owner_id) const;

    // Immediate-recall collection (raw messages, 256D only, always current).
    void upsert_message(const std::string& owner_id, const std::string& message_id,
                        const Embedding256& e256);
    std::vector<std::pair<std::string, double>> immediate_recall(const Embedding768& q,
                                                                 const std::string& owner_id,
                                                                 std::size_t k) const;
    const Embedding256* find_message(const std::string& owner_id,
                                     const std::string& message_id) const;

private:
    struct MemEntry {
        std::string id;
        Embedding768 e768;
        Embedding256 e256;
        bool is_current = true;
    };
    struct MsgEntry {
        std::string id;
        Embedding256 e256;
    };
    struct Bucket {
        std::vector<MemEntry> memories;
        std::unordered_map<std::string, std::size_t> memory_pos;
        std::vector<MsgEntry> messages;
        std::unordered_map<std::string, std::size_t> message_pos;
    };

    Bucket& bucket(const std::string& owner_id);
    const Bucket* find_bucket(const std::string& owner_id) const;

    std::unordered_map<std::string, Bucket> buckets_;
    mutable std::shared_mutex map_mtx_;
};

}  // namespace mnemo
