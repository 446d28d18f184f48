#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mnemo/embedder.hpp"
#include "mnemo/extractor.hpp"
#include "mnemo/journal.hpp"
#include "mnemo/lexical_index.hpp"
#include "mnemo/query_analysis.hpp"
#include "mnemo/reranker.hpp"
#include "mnemo/types.hpp"
#include "mnemo/vector_store.hpp"

namespace mnemo {

struct EngineConfig {
    FusionConfig fusion;
    TemporalConfig temporal;
    int retrieve_context_n = 10;  // memories handed to the extractor
    int snapshot_interval = 500;  // journal entries between snapshots; 0 = never

    void validate() const;
};

struct ApplyError {
    std::size_t op_index = 0;
    std::string code;  // invalid_op | unknown_replaces_id | stale_target
    std::string message;
};

struct ApplyResult {
    std::vector<std::string> added;
    std::vector<std::string> updated;  // ids of the new versions
    std::vector<std::string> deleted;
    int skipped = 0;
    std::vector<ApplyError> errors;
};

struct ProcessResult {
    int added = 0;
    int updated = 0;
    int deleted = 0;
    int skipped = 0;
    int batches = 0;
    std::vector<ApplyError> errors;
};

struct SearchOptions {
    std::size_t k = 5;
    std::optional<bool> historical_override;  // forces include_historical
    std::optional<UtcSeconds> now;            // reference clock for temporal analysis
    bool include_timings = false;             // timings stay out of the result otherwise
};

// Orchestrates the document store, both indexes and the helper contracts.
//
// Write operations to the same owner are serialized; different owners proceed
// in parallel and reads only take shared locks. When a journal is attached,
// every completed write is appended (and flushed) before the call returns, and
// a snapshot is cut every snapshot_interval entries.
class MemoryEngine {
public:
    MemoryEngine(EngineConfig cfg, std::shared_ptr<Embedder> embedder,
                 std::shared_ptr<Extractor> extractor, std::shared_ptr<Reranker> reranker,
                 std::unique_ptr<Journal> journal = nullptr);

    // Parses and stores a batch of transcript lines (all-or-nothing on
    // malformed input), indexes each message into the immediate-recall
    // collection, returns the stored records in input order.
    std::vector<MessageRecord> ingest(const std::string& owner_id, const std::string& session_id,
                                      const std::vector<std::string>& lines);

    // Same, but replays the recorded outcome when (owner, key) was already
    // seen: returns the original message ids with replayed = true.
    std::pair<std::vector<std::string>, bool> ingest_idempotent(
        const std::string& owner_id, const std::string& session_id,
        const std::vector<std::string>& lines, const std::string& idempotency_key);

    // Top retrieve_context_n current memories most similar to the joined
    // batch text; the context handed to the extractor.
    std::vector<MemoryRecord> retrieve_context(const std::string& owner_id,
                                               const std::vector<MessageRecord>& batch) const;

    // Validates and applies extraction operations. Bad operations are reported
    // in errors and skipped; the rest still apply. Afterwards every message in
    // batch_message_ids is flagged processed.
    ApplyResult apply_operations(const std::string& owner_id,
                                 const std::vector<ExtractionOp>& ops,
                                 const std::vector<std::string>& batch_message_ids = {},
                                 std::optional<UtcSeconds> now = std::nullopt);

    // Runs the extractor over every pending batch, one call per (owner,
    // session). All extractor calls happen before any state change, so an
    // extractor failure propagates with zero state change.
    ProcessResult process_pending(const std::string& owner_id,
                                  std::optional<UtcSeconds> now = std::nullopt);

    // Full ranking pipeline: analyze -> two-stage vector + BM25 -> RRF ->
    // optional temporal boost -> dedup -> rerank (or chronological annotation
    // for history-intent queries) -> top k.
    SearchResult search(const std::string& owner_id, const std::string& query,
                        const SearchOptions& opts = {}) const;

    // Version chain containing memory_id, oldest first. NotFoundError when the
    // id does not exist under this owner.
    std::vector<MemoryRecord> history(const std::string& owner_id,
                                      const std::string& memory_id) const;

    // Raw-message recall over the 256D immediate collection.
    std::vector<std::pair<MessageRecord, double>> immediate_recall(const std::string& owner_id,
                                                                   const std::string& query,
                                                                   std::size_t k) const;

    std::optional<MemoryRecord> find_memory(const std::string& owner_id,
                                            const std::string& id) const;
    std::vector<MemoryRecord> memories(const std::string& owner_id) const;
    std::vector<MessageRecord> messages(const std::string& owner_id) const;
    std::size_t pending_count(const std::string& owner_id) const;
    std::vector<std::string> owners() const;

    void snapshot_now();

    const EngineConfig& config() const { return cfg_; }
    Embedder& embedder() { return *embedder_; }

private:
    struct OwnerState {
        mutable std::shared_mutex mtx;
        std::unordered_map<std::string, MessageRecord> messages;
        std::vector<std::string> message_order;
        std::unordered_map<std::string, MemoryRecord> memories;
        std::vector<std::string> memory_order;
        std::unordered_map<std::string, std::string> replaced_by;  // old id -> newer id
        std::unordered_map<std::string, std::vector<std::string>> idempotency;
    };

    OwnerState& owner(const std::string& owner_id);
    const OwnerState* find_owner(const std::string& owner_id) const;

    std::string next_id();
    void bump_next_id(const std::string& id);

    // In-memory effect appliers, shared between live writes and replay.
    void insert_message(OwnerState& st, const MessageRecord& rec, const Embedding256& e256);
    void insert_memory(OwnerState& st, const MemoryRecord& rec, const Embedding768& e768);
    void flag_memory(OwnerState& st, const std::string& owner_id, const std::string& id,
                     bool is_current, MemoryStatus status);

    ApplyResult apply_locked(OwnerState& st, const std::string& owner_id,
                             const std::vector<ExtractionOp>& ops,
                             const std::vector<std::string>& batch_message_ids,
                             std::optional<UtcSeconds> now);
    std::vector<MemoryRecord> retrieve_context_locked(const OwnerState& st,
                                                      const std::string& owner_id,
                                                      const std::vector<MessageRecord>& batch) const;

    void load();  // snapshot + replay
    void apply_journal_entry(const nlohmann::json& entry);
    nlohmann::json state_dump() const;  // caller holds global unique lock
    void maybe_snapshot();

    EngineConfig cfg_;
    std::shared_ptr<Embedder> embedder_;
    std::shared_ptr<Extractor> extractor_;
    std::shared_ptr<Reranker> reranker_;
    std::unique_ptr<Journal> journal_;

    LexicalIndex lexical_;        // extracted memories
    MatryoshkaStore vectors_;     // memories + immediate recall

    mutable std::shared_mutex global_mtx_;  // unique only while snapshotting
    mutable std::mutex owners_mtx_;
    std::unordered_map<std::string, std::unique_ptr<OwnerState>> owners_;
    std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace mnemo
