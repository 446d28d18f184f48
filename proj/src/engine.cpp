#include "mnemo/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>

#include "mnemo/errors.hpp"
#include "mnemo/fusion.hpp"
#include "mnemo/json_io.hpp"
#include "mnemo/message.hpp"
#include "mnemo/text_analysis.hpp"

namespace mnemo {

namespace {

UtcSeconds wall_now() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::int64_t elapsed_us(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                                 since)
        .count();
}

void require_owner_id(const std::string& owner_id) {
    if (owner_id.empty()) throw InvalidArgumentError("owner_id must not be empty");
}

}  // namespace

void EngineConfig::validate() const {
    fusion.validate();
    temporal.validate();
    if (retrieve_context_n < 1) throw ConfigError("engine: retrieve_context_n must be >= 1");
    if (snapshot_interval < 0) throw ConfigError("engine: snapshot_interval must be >= 0");
}

MemoryEngine::MemoryEngine(EngineConfig cfg, std::shared_ptr<Embedder> embedder,
                           std::shared_ptr<Extractor> extractor, std::shared_ptr<Reranker> reranker,
                           std::unique_ptr<Journal> journal)
    : cfg_(cfg),
      embedder_(std::move(embedder)),
      extractor_(std::move(extractor)),
      reranker_(std::move(reranker)),
      journal_(std::move(journal)) {
    cfg_.validate();
    if (!embedder_) throw ConfigError("engine: an embedder is required");
    load();
}

MemoryEngine::OwnerState& MemoryEngine::owner(const std::string& owner_id) {
    std::lock_guard lk(owners_mtx_);
    auto& slot = owners_[owner_id];
    if (!slot) slot = std::make_unique<OwnerState>();
    return *slot;
}

const MemoryEngine::OwnerState* MemoryEngine::find_owner(const std::string& owner_id) const {
    std::lock_guard lk(owners_mtx_);
    auto it = owners_.find(owner_id);
    return it == owners_.end() ? nullptr : it->second.get();
}

std::string MemoryEngine::next_id() {
    return std::to_string(next_id_.fetch_add(1));
}

void MemoryEngine::bump_next_id(const std::string& id) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(id.c_str(), &end, 10);
    if (end == id.c_str() || *end != '\0') return;
    std::uint64_t want = v + 1;
    std::uint64_t cur = next_id_.load();
    while (want > cur && !next_id_.compare_exchange_weak(cur, want)) {
    }
}

void MemoryEngine::insert_message(OwnerState& st, const MessageRecord& rec,
                                  const Embedding256& e256) {
    st.messages[rec.id] = rec;
    st.message_order.push_back(rec.id);
    vectors_.upsert_message(rec.owner_id, rec.id, e256);
}

void MemoryEngine::insert_memory(OwnerState& st, const MemoryRecord& rec,
                                 const Embedding768& e768) {
    st.memories[rec.id] = rec;
    st.memory_order.push_back(rec.id);
    if (rec.replaces_id) st.replaced_by[*rec.replaces_id] = rec.id;
    lexical_.index_document(rec.owner_id, rec.id, rec.content, rec.is_current);
    vectors_.upsert_memory(rec.owner_id, rec.id, e768, rec.is_current);
}

void MemoryEngine::flag_memory(OwnerState& st, const std::string& owner_id, const std::string& id,
                               bool is_current, MemoryStatus status) {
    auto it = st.memories.find(id);
    if (it == st.memories.end()) return;
    it->second.is_current = is_current;
    it->second.status = status;
    lexical_.set_current(owner_id, id, is_current);
    vectors_.set_memory_current(owner_id, id, is_current);
}

std::vector<MessageRecord> MemoryEngine::ingest(const std::string& owner_id,
                                                const std::string& session_id,
                                                const std::vector<std::string>& lines) {
    require_owner_id(owner_id);
    if (session_id.empty()) throw InvalidArgumentError("session_id must not be empty");
    auto parsed = parse_transcript(lines);  // all-or-nothing

    std::vector<MessageRecord> out;
    out.reserve(parsed.size());
    {
        std::shared_lock g(global_mtx_);
        OwnerState& st = owner(owner_id);
        std::unique_lock lk(st.mtx);

        nlohmann::json jmsgs = nlohmann::json::array();
        for (const auto& p : parsed) {
            MessageRecord rec;
            rec.id = next_id();
            rec.owner_id = owner_id;
            rec.session_id = session_id;
            rec.speaker = p.speaker;
            rec.text = p.text;
            rec.timestamp = p.timestamp;
            Embedding256 e256 =
                truncate_normalize(embedder_->embed(rec.text, EmbedRole::document));
            insert_message(st, rec, e256);
            if (journal_) {
                nlohmann::json jm = to_json(rec);
                jm["e256"] = embedding_to_json(e256);
                jmsgs.push_back(std::move(jm));
            }
            out.push_back(rec);
        }
        if (journal_)
            journal_->append({{"type", "ingest"}, {"owner", owner_id}, {"messages", jmsgs}});
    }
    maybe_snapshot();
    return out;
}

std::pair<std::vector<std::string>, bool> MemoryEngine::ingest_idempotent(
    const std::string& owner_id, const std::string& session_id,
    const std::vector<std::string>& lines, const std::string& idempotency_key) {
    require_owner_id(owner_id);
    if (session_id.empty()) throw InvalidArgumentError("session_id must not be empty");
    if (idempotency_key.empty()) throw InvalidArgumentError("idempotency key must not be empty");
    auto parsed = parse_transcript(lines);

    std::vector<std::string> ids;
    {
        std::shared_lock g(global_mtx_);
        OwnerState& st = owner(owner_id);
        std::unique_lock lk(st.mtx);

        auto seen = st.idempotency.find(idempotency_key);
        if (seen != st.idempotency.end()) return {seen->second, true};

        nlohmann::json jmsgs = nlohmann::json::array();
        for (const auto& p : parsed) {
            MessageRecord rec;
            rec.id = next_id();
            rec.owner_id = owner_id;
            rec.session_id = session_id;
            rec.speaker = p.speaker;
            rec.text = p.text;
            rec.timestamp = p.timestamp;
            Embedding256 e256 =
                truncate_normalize(embedder_->embed(rec.text, EmbedRole::document));
            insert_message(st, rec, e256);
            if (journal_) {
                nlohmann::json jm = to_json(rec);
                jm["e256"] = embedding_to_json(e256);
                jmsgs.push_back(std::move(jm));
            }
            ids.push_back(rec.id);
        }
        st.idempotency[idempotency_key] = ids;
        if (journal_)
            journal_->append({{"type", "ingest"},
                              {"owner", owner_id},
                              {"idem_key", idempotency_key},
                              {"messages", jmsgs}});
    }
    maybe_snapshot();
    return {ids, false};
}

std::vector<MemoryRecord> MemoryEngine::retrieve_context_locked(
    const OwnerState& st, const std::string& owner_id,
    const std::vector<MessageRecord>& batch) const {
    if (batch.empty()) return {};
    std::string joined;
    for (const auto& msg : batch) {
        if (!joined.empty()) joined += "\n";
        joined += msg.speaker + ": " + msg.text;
    }
    Embedding768 q = embedder_->embed(joined, EmbedRole::query);
    auto scored = vectors_.two_stage_search(q, VectorFilter{owner_id, true},
                                            std::size_t(cfg_.retrieve_context_n),
                                            std::size_t(cfg_.fusion.shortlist_size));
    std::vector<MemoryRecord> out;
    out.reserve(scored.size());
    for (const auto& [id, _] : scored) out.push_back(st.memories.at(id));
    return out;
}

std::vector<MemoryRecord> MemoryEngine::retrieve_context(
    const std::string& owner_id, const std::vector<MessageRecord>& batch) const {
    require_owner_id(owner_id);
    std::shared_lock g(global_mtx_);
    const OwnerState* st = find_owner(owner_id);
    if (!st) return {};
    std::shared_lock lk(st->mtx);
    return retrieve_context_locked(*st, owner_id, batch);
}

ApplyResult MemoryEngine::apply_locked(OwnerState& st, const std::string& owner_id,
                                       const std::vector<ExtractionOp>& ops,
                                       const std::vector<std::string>& batch_message_ids,
                                       std::optional<UtcSeconds> now) {
    ApplyResult res;
    nlohmann::json jadded = nlohmann::json::array();
    nlohmann::json jflags = nlohmann::json::array();
    nlohmann::json jprocessed = nlohmann::json::array();

    // created_at comes from the newest message of the triggering batch so the
    // outcome of replaying the same conversation is reproducible.
    UtcSeconds created = now ? *now : wall_now();
    std::optional<std::string> session;
    bool have_ts = false;
    UtcSeconds max_ts{};
    for (const auto& mid : batch_message_ids) {
        auto it = st.messages.find(mid);
        if (it == st.messages.end()) continue;
        session = it->second.session_id;
        if (!have_ts || it->second.timestamp > max_ts) {
            max_ts = it->second.timestamp;
            have_ts = true;
        }
    }
    if (have_ts) created = max_ts;

    auto fail = [&](std::size_t i, const char* code, std::string msg) {
        res.errors.push_back(ApplyError{i, code, std::move(msg)});
    };

    auto add_record = [&](const ExtractionOp& op, int version,
                          std::optional<std::string> replaces, Category category,
                          std::optional<std::string> sess) {
        MemoryRecord rec;
        rec.id = next_id();
        rec.owner_id = owner_id;
        rec.content = op.fact;
        rec.category = category;
        rec.scope = Scope::user;
        rec.session_id = std::move(sess);
        rec.version = version;
        rec.replaces_id = std::move(replaces);
        rec.is_current = true;
        rec.status = MemoryStatus::active;
        if (op.event_date) rec.event_time = UtcSeconds(*op.event_date);
        rec.created_at = created;
        Embedding768 e768 = embedder_->embed(rec.content, EmbedRole::document);
        insert_memory(st, rec, e768);
        if (journal_) {
            nlohmann::json jm = to_json(rec);
            jm["e768"] = embedding_to_json(e768);
            jadded.push_back(std::move(jm));
        }
        return rec.id;
    };

    for (std::size_t i = 0; i < ops.size(); ++i) {
        const ExtractionOp& op = ops[i];
        switch (op.action) {
            case OpAction::none:
                ++res.skipped;
                break;
            case OpAction::add: {
                if (op.fact.empty()) {
                    fail(i, "invalid_op", "ADD requires a fact");
                    break;
                }
                res.added.push_back(add_record(op, 1, std::nullopt,
                                               op.category.value_or(Category::misc), session));
                break;
            }
            case OpAction::update: {
                if (op.fact.empty() || !op.replaces_id) {
                    fail(i, "invalid_op", "UPDATE requires fact and replaces_id");
                    break;
                }
                auto it = st.memories.find(*op.replaces_id);
                if (it == st.memories.end()) {
                    fail(i, "unknown_replaces_id", "no memory " + *op.replaces_id);
                    break;
                }
                if (!it->second.is_current) {
                    fail(i, "stale_target", "memory " + *op.replaces_id + " is not current");
                    break;
                }
                MemoryRecord old = it->second;
                flag_memory(st, owner_id, old.id, false, MemoryStatus::historical);
                if (journal_)
                    jflags.push_back(
                        {{"id", old.id}, {"is_current", false}, {"status", "historical"}});
                res.updated.push_back(add_record(op, old.version + 1, old.id,
                                                 op.category.value_or(old.category),
                                                 session ? session : old.session_id));
                break;
            }
            case OpAction::del: {
                if (!op.replaces_id) {
                    fail(i, "invalid_op", "DELETE requires replaces_id");
                    break;
                }
                auto it = st.memories.find(*op.replaces_id);
                if (it == st.memories.end()) {
                    fail(i, "unknown_replaces_id", "no memory " + *op.replaces_id);
                    break;
                }
                if (!it->second.is_current) {
                    fail(i, "stale_target", "memory " + *op.replaces_id + " is not current");
                    break;
                }
                flag_memory(st, owner_id, it->first, false, MemoryStatus::deleted);
                if (journal_)
                    jflags.push_back(
                        {{"id", *op.replaces_id}, {"is_current", false}, {"status", "deleted"}});
                res.deleted.push_back(*op.replaces_id);
                break;
            }
        }
    }

    for (const auto& mid : batch_message_ids) {
        auto it = st.messages.find(mid);
        if (it == st.messages.end() || it->second.processed) continue;
        it->second.processed = true;
        jprocessed.push_back(mid);
    }

    if (journal_ && (!jadded.empty() || !jflags.empty() || !jprocessed.empty()))
        journal_->append({{"type", "apply"},
                          {"owner", owner_id},
                          {"added", jadded},
                          {"flags", jflags},
                          {"processed", jprocessed}});
    return res;
}

ApplyResult MemoryEngine::apply_operations(const std::string& owner_id,
                                           const std::vector<ExtractionOp>& ops,
                                           const std::vector<std::string>& batch_message_ids,
                                           std::optional<UtcSeconds> now) {
    require_owner_id(owner_id);
    ApplyResult res;
    {
        std::shared_lock g(global_mtx_);
        OwnerState& st = owner(owner_id);
        std::unique_lock lk(st.mtx);
        res = apply_locked(st, owner_id, ops, batch_message_ids, now);
    }
    maybe_snapshot();
    return res;
}

ProcessResult MemoryEngine::process_pending(const std::string& owner_id,
                                            std::optional<UtcSeconds> now) {
    require_owner_id(owner_id);
    ProcessResult out;
    {
        std::shared_lock g(global_mtx_);
        OwnerState& st = owner(owner_id);
        std::unique_lock lk(st.mtx);

        std::vector<std::pair<std::string, std::vector<MessageRecord>>> batches;
        std::unordered_map<std::string, std::size_t> pos;
        for (const auto& mid : st.message_order) {
            const MessageRecord& rec = st.messages.at(mid);
            if (rec.processed) continue;
            auto [it, fresh] = pos.try_emplace(rec.session_id, batches.size());
            if (fresh) batches.emplace_back(rec.session_id, std::vector<MessageRecord>{});
            batches[it->second].second.push_back(rec);
        }

        // Extraction first, all of it: a thrown extractor error leaves every
        // message unprocessed and no memory touched.
        std::vector<std::vector<ExtractionOp>> all_ops;
        all_ops.reserve(batches.size());
        for (const auto& [_, batch] : batches)
            all_ops.push_back(
                extractor_->extract(batch, retrieve_context_locked(st, owner_id, batch)));

        for (std::size_t i = 0; i < batches.size(); ++i) {
            std::vector<std::string> ids;
            ids.reserve(batches[i].second.size());
            for (const auto& msg : batches[i].second) ids.push_back(msg.id);
            ApplyResult r = apply_locked(st, owner_id, all_ops[i], ids, now);
            out.added += int(r.added.size());
            out.updated += int(r.updated.size());
            out.deleted += int(r.deleted.size());
            out.skipped += r.skipped;
            out.errors.insert(out.errors.end(), r.errors.begin(), r.errors.end());
            ++out.batches;
        }
    }
    maybe_snapshot();
    return out;
}

SearchResult MemoryEngine::search(const std::string& owner_id, const std::string& query,
                                  const SearchOptions& opts) const {
    require_owner_id(owner_id);
    if (opts.k < 1) throw InvalidArgumentError("k must be >= 1");
    if (analyze_text(query).empty())
        throw EmptyQueryError("query has no indexable tokens: '" + query + "'");

    auto t0 = std::chrono::steady_clock::now();
    StageTimings timings;

    UtcSeconds now = opts.now ? *opts.now : wall_now();
    auto ta = std::chrono::steady_clock::now();
    QueryAnalysis analysis = analyze_query(query, now, cfg_.temporal);
    if (opts.historical_override) analysis.include_historical = *opts.historical_override;
    timings.analyze_us = elapsed_us(ta);

    SearchResult result;
    result.analysis = analysis;

    auto te = std::chrono::steady_clock::now();
    Embedding768 q768 = embedder_->embed(query, EmbedRole::query);
    timings.embed_us = elapsed_us(te);

    std::shared_lock g(global_mtx_);
    const OwnerState* stp = find_owner(owner_id);
    if (!stp) {
        timings.total_us = elapsed_us(t0);
        if (opts.include_timings) result.timings = timings;
        return result;
    }
    const OwnerState& st = *stp;
    std::shared_lock lk(st.mtx);

    const bool current_only = !analysis.include_historical;

    auto tv = std::chrono::steady_clock::now();
    auto vec = vectors_.two_stage_search(q768, VectorFilter{owner_id, current_only},
                                         std::size_t(cfg_.fusion.candidate_depth),
                                         std::size_t(cfg_.fusion.shortlist_size));
    timings.vector_us = elapsed_us(tv);

    auto tl = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> lex;
    try {
        lex = lexical_.search(LexicalQuery{query, owner_id, current_only,
                                           std::size_t(cfg_.fusion.candidate_depth)});
    } catch (const EmptyQueryError&) {
        // vector modality still applies
    }
    timings.lexical_us = elapsed_us(tl);

    auto tf = std::chrono::steady_clock::now();
    std::vector<std::string> vec_ids, lex_ids;
    vec_ids.reserve(vec.size());
    for (auto& [id, _] : vec) vec_ids.push_back(id);
    lex_ids.reserve(lex.size());
    for (auto& [id, _] : lex) lex_ids.push_back(id);
    auto hits = rrf_fuse(vec_ids, lex_ids, cfg_.fusion);

    for (ScoredHit& h : hits) {
        const MemoryRecord& rec = st.memories.at(h.memory_id);
        h.content = rec.content;
        h.category = rec.category;
        h.scope = rec.scope;
        h.version = rec.version;
        h.replaces_id = rec.replaces_id;
        h.is_current = rec.is_current;
        h.status = rec.status;
        h.event_time = rec.event_time;
        h.created_at = rec.created_at;
    }

    if (analysis.temporal_intent) apply_temporal_boost(hits, analysis, cfg_.temporal);

    dedup_hits(
        hits, [&](const std::string& id) { return vectors_.find_memory(owner_id, id); },
        cfg_.fusion.dedup_threshold);
    timings.fuse_us = elapsed_us(tf);

    auto tr = std::chrono::steady_clock::now();
    if (analysis.include_historical) {
        // Chronological story of the matching facts; reranking is skipped.
        std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
            if (a.created_at != b.created_at) return a.created_at < b.created_at;
            if (a.version != b.version) return a.version < b.version;
            return a.memory_id < b.memory_id;
        });
    } else {
        std::size_t n = std::min(hits.size(), std::size_t(cfg_.fusion.rerank_top_n));
        if (n > 0) {
            std::vector<std::pair<std::string, std::string>> cands;
            cands.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                cands.emplace_back(hits[i].memory_id, hits[i].content);
            try {
                auto scores = reranker_ ? reranker_->rescore(query, cands) : std::vector<double>{};
                if (reranker_) {
                    if (scores.size() != n)
                        throw RemoteError("reranker", "score count mismatch");
                    for (std::size_t i = 0; i < n; ++i) hits[i].rerank_score = scores[i];
                    std::sort(hits.begin(), hits.begin() + std::ptrdiff_t(n),
                              [](const ScoredHit& a, const ScoredHit& b) {
                                  if (*a.rerank_score != *b.rerank_score)
                                      return *a.rerank_score > *b.rerank_score;
                                  return a.memory_id < b.memory_id;
                              });
                }
            } catch (const std::exception&) {
                result.reranker_degraded = true;
                for (std::size_t i = 0; i < n; ++i) hits[i].rerank_score.reset();
            }
        }
    }
    timings.rerank_us = elapsed_us(tr);

    if (hits.size() > opts.k) hits.resize(opts.k);
    result.hits = std::move(hits);
    timings.total_us = elapsed_us(t0);
    if (opts.include_timings) result.timings = timings;
    return result;
}

std::vector<MemoryRecord> MemoryEngine::history(const std::string& owner_id,
                                                const std::string& memory_id) const {
    require_owner_id(owner_id);
    std::shared_lock g(global_mtx_);
    const OwnerState* stp = find_owner(owner_id);
    if (!stp) throw NotFoundError("no memory " + memory_id + " for owner " + owner_id);
    const OwnerState& st = *stp;
    std::shared_lock lk(st.mtx);

    if (!st.memories.count(memory_id))
        throw NotFoundError("no memory " + memory_id + " for owner " + owner_id);

    // Walk back to the root, then forward through the chain.
    std::string root = memory_id;
    std::unordered_map<std::string, bool> seen;
    while (true) {
        seen[root] = true;
        const MemoryRecord& rec = st.memories.at(root);
        if (!rec.replaces_id || !st.memories.count(*rec.replaces_id) || seen.count(*rec.replaces_id))
            break;
        root = *rec.replaces_id;
    }
    std::vector<MemoryRecord> chain;
    std::string cur = root;
    while (true) {
        chain.push_back(st.memories.at(cur));
        auto next = st.replaced_by.find(cur);
        if (next == st.replaced_by.end() || !st.memories.count(next->second)) break;
        cur = next->second;
    }
    return chain;
}

std::vector<std::pair<MessageRecord, double>> MemoryEngine::immediate_recall(
    const std::string& owner_id, const std::string& query, std::size_t k) const {
    require_owner_id(owner_id);
    if (analyze_text(query).empty())
        throw EmptyQueryError("query has no indexable tokens: '" + query + "'");
    Embedding768 q = embedder_->embed(query, EmbedRole::query);
    std::shared_lock g(global_mtx_);
    const OwnerState* stp = find_owner(owner_id);
    if (!stp) return {};
    std::shared_lock lk(stp->mtx);
    auto scored = vectors_.immediate_recall(q, owner_id, k);
    std::vector<std::pair<MessageRecord, double>> out;
    out.reserve(scored.size());
    for (const auto& [id, score] : scored) out.emplace_back(stp->messages.at(id), score);
    return out;
}

std::optional<MemoryRecord> MemoryEngine::find_memory(const std::string& owner_id,
                                                      const std::string& id) const {
    std::shared_lock g(global_mtx_);
    const OwnerState* st = find_owner(owner_id);
    if (!st) return std::nullopt;
    std::shared_lock lk(st->mtx);
    auto it = st->memories.find(id);
    if (it == st->memories.end()) return std::nullopt;
    return it->second;
}

std::vector<MemoryRecord> MemoryEngine::memories(const std::string& owner_id) const {
    std::shared_lock g(global_mtx_);
    const OwnerState* st = find_owner(owner_id);
    if (!st) return {};
    std::shared_lock lk(st->mtx);
    std::vector<MemoryRecord> out;
    out.reserve(st->memory_order.size());
    for (const auto& id : st->memory_order) out.push_back(st->memories.at(id));
    return out;
}

std::vector<MessageRecord> MemoryEngine::messages(const std::string& owner_id) const {
    std::shared_lock g(global_mtx_);
    const OwnerState* st = find_owner(owner_id);
    if (!st) return {};
    std::shared_lock lk(st->mtx);
    std::vector<MessageRecord> out;
    out.reserve(st->message_order.size());
    for (const auto& id : st->message_order) out.push_back(st->messages.at(id));
    return out;
}

std::size_t MemoryEngine::pending_count(const std::string& owner_id) const {
    std::shared_lock g(global_mtx_);
    const OwnerState* st = find_owner(owner_id);
    if (!st) return 0;
    std::shared_lock lk(st->mtx);
    std::size_t n = 0;
    for (const auto& [_, rec] : st->messages)
        if (!rec.processed) ++n;
    return n;
}

std::vector<std::string> MemoryEngine::owners() const {
    std::lock_guard lk(owners_mtx_);
    std::vector<std::string> out;
    out.reserve(owners_.size());
    for (const auto& [name, _] : owners_) out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
}

nlohmann::json MemoryEngine::state_dump() const {
    nlohmann::json jowners = nlohmann::json::object();
    for (const auto& name : owners()) {
        const OwnerState* st = find_owner(name);
        if (!st) continue;
        nlohmann::json msgs = nlohmann::json::array();
        for (const auto& id : st->message_order) {
            nlohmann::json jm = to_json(st->messages.at(id));
            const Embedding256* e = vectors_.find_message(name, id);
            if (e) jm["e256"] = embedding_to_json(*e);
            msgs.push_back(std::move(jm));
        }
        nlohmann::json mems = nlohmann::json::array();
        for (const auto& id : st->memory_order) {
            nlohmann::json jm = to_json(st->memories.at(id));
            const Embedding768* e = vectors_.find_memory(name, id);
            if (e) jm["e768"] = embedding_to_json(*e);
            mems.push_back(std::move(jm));
        }
        nlohmann::json idem = nlohmann::json::object();
        for (const auto& [key, ids] : st->idempotency) idem[key] = ids;
        jowners[name] = {{"messages", msgs}, {"memories", mems}, {"idempotency", idem}};
    }
    return {{"owners", jowners}, {"next_id", next_id_.load()}};
}

void MemoryEngine::snapshot_now() {
    if (!journal_) return;
    std::unique_lock g(global_mtx_);
    journal_->write_snapshot(state_dump());
}

void MemoryEngine::maybe_snapshot() {
    if (!journal_ || cfg_.snapshot_interval <= 0) return;
    if (journal_->entries_since_snapshot() >= std::uint64_t(cfg_.snapshot_interval))
        snapshot_now();
}

void MemoryEngine::apply_journal_entry(const nlohmann::json& entry) {
    const std::string type = entry.at("type").get<std::string>();
    const std::string owner_name = entry.at("owner").get<std::string>();
    OwnerState& st = owner(owner_name);
    if (type == "ingest") {
        std::vector<std::string> ids;
        for (const auto& jm : entry.at("messages")) {
            MessageRecord rec = message_from_json(jm);
            insert_message(st, rec, embedding_from_json<256>(jm.at("e256")));
            bump_next_id(rec.id);
            ids.push_back(rec.id);
        }
        if (entry.contains("idem_key")) st.idempotency[entry["idem_key"].get<std::string>()] = ids;
    } else if (type == "apply") {
        for (const auto& jm : entry.at("added")) {
            MemoryRecord rec = memory_from_json(jm);
            insert_memory(st, rec, embedding_from_json<768>(jm.at("e768")));
            bump_next_id(rec.id);
        }
        for (const auto& jf : entry.at("flags")) {
            auto status = status_from_string(jf.at("status").get<std::string>());
            flag_memory(st, owner_name, jf.at("id").get<std::string>(),
                        jf.at("is_current").get<bool>(), status.value_or(MemoryStatus::historical));
        }
        for (const auto& jid : entry.at("processed")) {
            auto it = st.messages.find(jid.get<std::string>());
            if (it != st.messages.end()) it->second.processed = true;
        }
    } else {
        throw Error("unknown journal entry type: " + type);
    }
}

void MemoryEngine::load() {
    if (!journal_) return;
    auto snap = journal_->load_snapshot();
    if (!snap.is_null() && snap.contains("state")) {
        const auto& state = snap["state"];
        if (state.contains("owners")) {
            for (const auto& [name, ostate] : state["owners"].items()) {
                OwnerState& st = owner(name);
                for (const auto& jm : ostate.at("messages")) {
                    MessageRecord rec = message_from_json(jm);
                    insert_message(st, rec, embedding_from_json<256>(jm.at("e256")));
                    bump_next_id(rec.id);
                }
                for (const auto& jm : ostate.at("memories")) {
                    MemoryRecord rec = memory_from_json(jm);
                    insert_memory(st, rec, embedding_from_json<768>(jm.at("e768")));
                    bump_next_id(rec.id);
                }
                if (ostate.contains("idempotency"))
                    for (const auto& [key, ids] : ostate["idempotency"].items())
                        st.idempotency[key] = ids.get<std::vector<std::string>>();
            }
        }
        if (state.contains("next_id")) bump_next_id(std::to_string(state["next_id"].get<std::uint64_t>() - 1));
    }
    journal_->replay([this](const nlohmann::json& e) { apply_journal_entry(e); });
}

}  // namespace mnemo
