#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnemo/errors.hpp"
#include "mnemo/eval/dataset.hpp"
#include "mnemo/eval/metrics.hpp"

namespace mnemo::eval {

enum class EvalPhase { ingest, indexing, search, answer, evaluate };
const char* to_string(EvalPhase p);

// Any failure aborts the run and names the phase it happened in.
struct PhaseError : Error {
    PhaseError(EvalPhase p, const std::string& msg)
        : Error(std::string(to_string(p)) + " phase: " + msg), phase(p) {}
    EvalPhase phase;
};

struct ClientHit {
    std::string id;
    std::string content;
};

// The engine surface the harness drives. Must be safe to call from several
// threads at once (the harness parallelizes the search phase).
class EngineClient {
public:
    virtual ~EngineClient() = default;
    virtual bool healthy() = 0;
    virtual std::vector<std::string> ingest(const std::string& owner, const std::string& session,
                                            const std::vector<std::string>& lines) = 0;
    virtual void process(const std::string& owner) = 0;
    virtual std::vector<ClientHit> search(const std::string& owner, const std::string& query,
                                          std::size_t k) = 0;
};

class HttpEngineClient final : public EngineClient {
public:
    explicit HttpEngineClient(std::string base_url, int timeout_ms = 30000)
        : base_(std::move(base_url)), timeout_ms_(timeout_ms) {}

    bool healthy() override;
    std::vector<std::string> ingest(const std::string& owner, const std::string& session,
                                    const std::vector<std::string>& lines) override;
    void process(const std::string& owner) override;
    std::vector<ClientHit> search(const std::string& owner, const std::string& query,
                                  std::size_t k) override;

private:
    std::string base_;
    int timeout_ms_;
};

struct EvalConfig {
    std::size_t k = 5;
    int answer_top_n = 1;   // hits concatenated by the extractive answerer
    int parallelism = 1;    // worker threads in the search phase
    std::string answerer_mode = "extractive";  // extractive | remote
    std::string answerer_endpoint;
    std::string judge_mode = "none";  // none | remote
    std::string judge_endpoint;
    std::string prompts_dir = "assets/prompts";
    int remote_timeout_ms = 30000;
};

struct EvalReport {
    // Deterministic by construction: identical dataset + engine state produce
    // byte-identical JSON. Wall-clock latency therefore lives outside it.
    nlohmann::json report;
    double latency_p50_ms = 0.0;
    double latency_p95_ms = 0.0;
    double latency_p99_ms = 0.0;
    double latency_mean_ms = 0.0;
};

// Five phases: INGEST -> INDEXING -> SEARCH -> ANSWER -> EVALUATE.
//
// Relevance judgments are snippet-based: each evidence id names a text
// snippet; a retrieved memory matches the first still-unclaimed snippet its
// content contains (case-insensitive). Matched ranks are scored with
// rank_metrics against a relevant set of size |evidence_ids|, so evidence
// that never surfaces honestly depresses recall.
EvalReport run_eval(const EvalDataset& ds, EngineClient& client, const EvalConfig& cfg);

// Fixed-width summary table (per-type rows + overall + latency block).
std::string render_table(const EvalReport& report);

void write_report(const EvalReport& report, const std::string& path);

}  // namespace mnemo::eval
