#include "mnemo/vector_store.hpp"

#include <algorithm>
#include <mutex>

namespace mnemo {

namespace {

using Scored = std::pair<std::string, double>;

void sort_desc(std::vector<Scored>& v) {
    std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
}

}  // namespace

MatryoshkaStore::Bucket& MatryoshkaStore::bucket(const std::string& owner_id) {
    {
        std::shared_lock lk(map_mtx_);
        auto it = buckets_.find(owner_id);
        if (it != buckets_.end()) return it->second;
    }
    std::unique_lock lk(map_mtx_);
    return buckets_[owner_id];
}

const MatryoshkaStore::Bucket* MatryoshkaStore::find_bucket(const std::string& owner_id) const {
    std::shared_lock lk(map_mtx_);
    auto it = buckets_.find(owner_id);
    return it == buckets_.end() ? nullptr : &it->second;
}

void MatryoshkaStore::upsert_memory(const std::string& owner_id, const std::string& memory_id,
                                    const Embedding768& e768, bool is_current) {
    Bucket& b = bucket(owner_id);
    Embedding256 e256 = truncate_normalize(e768);
    auto it = b.memory_pos.find(memory_id);
    if (it != b.memory_pos.end()) {
        MemEntry& e = b.memories[it->second];
        e.e768 = e768;
        e.e256 = e256;
        e.is_current = is_current;
        return;
    }
    b.memory_pos.emplace(memory_id, b.memories.size());
    b.memories.push_back(MemEntry{memory_id, e768, e256, is_current});
}

void MatryoshkaStore::set_memory_current(const std::string& owner_id,
                                         const std::string& memory_id, bool is_current) {
    Bucket& b = bucket(owner_id);
    auto it = b.memory_pos.find(memory_id);
    if (it != b.memory_pos.end()) b.memories[it->second].is_current = is_current;
}

std::vector<Scored> MatryoshkaStore::search_accurate(const Embedding768& q, const VectorFilter& f,
                                                     std::size_t k) const {
    const Bucket* b = find_bucket(f.owner_id);
    if (!b) return {};
    std::vector<Scored> out;
    out.reserve(b->memories.size());
    for (const auto& e : b->memories) {
        if (f.current_only && !e.is_current) continue;
        out.emplace_back(e.id, q.dot(e.e768));
    }
    sort_desc(out);
    if (out.size() > k) out.resize(k);
    return out;
}

std::vector<Scored> MatryoshkaStore::search_fast(const Embedding256& q, const VectorFilter& f,
                                                 std::size_t k) const {
    const Bucket* b = find_bucket(f.owner_id);
    if (!b) return {};
    std::vector<Scored> out;
    out.reserve(b->memories.size());
    for (const auto& e : b->memories) {
        if (f.current_only && !e.is_current) continue;
        out.emplace_back(e.id, q.dot(e.e256));
    }
    sort_desc(out);
    if (out.size() > k) out.resize(k);
    return out;
}

std::vector<Scored> MatryoshkaStore::two_stage_search(const Embedding768& q, const VectorFilter& f,
                                                      std::size_t k, std::size_t shortlist) const {
    const Bucket* b = find_bucket(f.owner_id);
    if (!b) return {};
    auto stage1 = search_fast(truncate_normalize(q), f, shortlist);
    std::vector<Scored> out;
    out.reserve(stage1.size());
    for (const auto& [id, _] : stage1) {
        const MemEntry& e = b->memories[b->memory_pos.at(id)];
        out.emplace_back(id, q.dot(e.e768));
    }
    sort_desc(out);
    if (out.size() > k) out.resize(k);
    return out;
}

const Embedding768* MatryoshkaStore::find_memory(const std::string& owner_id,
                                                 const std::string& memory_id) const {
    const Bucket* b = find_bucket(owner_id);
    if (!b) return nullptr;
    auto it = b->memory_pos.find(memory_id);
    return it == b->memory_pos.end() ? nullptr : &b->memories[it->second].e768;
}

std::size_t MatryoshkaStore::memory_count(const std::string& owner_id) const {
    const Bucket* b = find_bucket(owner_id);
    return b ? b->memories.size() : 0;
}

void MatryoshkaStore::upsert_message(const std::string& owner_id, const std::string& message_id,
                                     const Embedding256& e256) {
    Bucket& b = bucket(owner_id);
    auto it = b.message_pos.find(message_id);
    if (it != b.message_pos.end()) {
        b.messages[it->second].e256 = e256;
        return;
    }
    b.message_pos.emplace(message_id, b.messages.size());
    b.messages.push_back(MsgEntry{message_id, e256});
}

std::vector<Scored> MatryoshkaStore::immediate_recall(const Embedding768& q,
                                                      const std::string& owner_id,
                                                      std::size_t k) const {
    const Bucket* b = find_bucket(owner_id);
    if (!b) return {};
    Embedding256 q256 = truncate_normalize(q);
    std::vector<Scored> out;
    out.reserve(b->messages.size());
    for (const auto& e : b->messages) out.emplace_back(e.id, q256.dot(e.e256));
    sort_desc(out);
    if (out.size() > k) out.resize(k);
    return out;
}

const Embedding256* MatryoshkaStore::find_message(const std::string& owner_id,
                                                  const std::string& message_id) const {
    const Bucket* b = find_bucket(owner_id);
    if (!b) return nullptr;
    auto it = b->message_pos.find(message_id);
    return it == b->message_pos.end() ? nullptr : &b->messages[it->second].e256;
}

}  // namespace mnemo
