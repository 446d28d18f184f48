#include "mnemo/eval/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "mnemo/remote.hpp"

namespace mnemo::eval {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower((unsigned char)c));
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open prompt file: " + path);
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
    for (std::size_t pos = text.find(from); pos != std::string::npos;
         pos = text.find(from, pos + to.size()))
        text.replace(pos, from.size(), to);
}

// Fills whichever placeholders the template actually uses; templates without
// a memories slot get the memories appended so nothing is lost.
std::string fill_prompt(std::string tmpl,
                        const std::vector<std::pair<std::string, std::string>>& values,
                        const std::string& memories) {
    bool has_memory_slot = tmpl.find("_memories}}") != std::string::npos;
    for (const auto& [key, value] : values) {
        replace_all(tmpl, "{{" + key + "}}", value);
        replace_all(tmpl, "{" + key + "}", value);
    }
    replace_all(tmpl, "{{speaker_1_memories}}", memories);
    replace_all(tmpl, "{{speaker_2_memories}}", "");
    if (!has_memory_slot && !memories.empty())
        tmpl += "\n\nMemories:\n" + memories + "\n";
    return tmpl;
}

double percentile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    std::size_t idx = std::size_t(std::ceil(q * double(sorted.size())));
    if (idx == 0) idx = 1;
    if (idx > sorted.size()) idx = sorted.size();
    return sorted[idx - 1];
}

struct Outcome {
    const EvalQuestion* q = nullptr;
    std::vector<ClientHit> hits;
    double search_ms = 0.0;
    std::string answer;
    F1 tf1;
    double b1 = 0.0;
    RankMetrics rank;
    std::optional<bool> judge_correct;
};

struct Agg {
    int count = 0;
    double tp = 0, tr = 0, tf = 0, b1 = 0;
    double hit = 0, mrr = 0, ndcg = 0, p = 0, r = 0, f1 = 0;
    int judged = 0, correct = 0;

    void add(const Outcome& o) {
        ++count;
        tp += o.tf1.precision;
        tr += o.tf1.recall;
        tf += o.tf1.f1;
        b1 += o.b1;
        hit += o.rank.hit_at_k;
        mrr += o.rank.mrr;
        ndcg += o.rank.ndcg;
        p += o.rank.precision;
        r += o.rank.recall;
        f1 += o.rank.f1;
        if (o.judge_correct) {
            ++judged;
            if (*o.judge_correct) ++correct;
        }
    }

    nlohmann::json to_json() const {
        double n = count > 0 ? double(count) : 1.0;
        nlohmann::json j{
            {"count", count},
            {"token_precision", tp / n},
            {"token_recall", tr / n},
            {"token_f1", tf / n},
            {"bleu1", b1 / n},
            {"hit_at_k", hit / n},
            {"mrr", mrr / n},
            {"ndcg", ndcg / n},
            {"precision_at_k", p / n},
            {"recall_at_k", r / n},
            {"f1_at_k", f1 / n},
        };
        if (judged > 0) j["judge_score"] = 100.0 * double(correct) / double(judged);
        return j;
    }
};

}  // namespace

const char* to_string(EvalPhase p) {
    switch (p) {
        case EvalPhase::ingest: return "INGEST";
        case EvalPhase::indexing: return "INDEXING";
        case EvalPhase::search: return "SEARCH";
        case EvalPhase::answer: return "ANSWER";
        case EvalPhase::evaluate: return "EVALUATE";
    }
    return "?";
}

bool HttpEngineClient::healthy() {
    return probe_ok(base_ + "/healthz", timeout_ms_);
}

std::vector<std::string> HttpEngineClient::ingest(const std::string& owner,
                                                  const std::string& session,
                                                  const std::vector<std::string>& lines) {
    auto reply = post_json("engine", base_ + "/v1/" + owner + "/messages",
                           {{"session_id", session}, {"lines", lines}}, timeout_ms_);
    return reply.at("message_ids").get<std::vector<std::string>>();
}

void HttpEngineClient::process(const std::string& owner) {
    post_json("engine", base_ + "/v1/" + owner + "/process", nlohmann::json::object(),
              timeout_ms_);
}

std::vector<ClientHit> HttpEngineClient::search(const std::string& owner,
                                                const std::string& query, std::size_t k) {
    auto reply = post_json("engine", base_ + "/v1/" + owner + "/search",
                           {{"query", query}, {"k", k}}, timeout_ms_);
    std::vector<ClientHit> hits;
    for (const auto& h : reply.at("hits"))
        hits.push_back(ClientHit{h.at("memory_id").get<std::string>(),
                                 h.at("content").get<std::string>()});
    return hits;
}

EvalReport run_eval(const EvalDataset& ds, EngineClient& client, const EvalConfig& cfg) {
    if (cfg.k < 1) throw PhaseError(EvalPhase::search, "k must be >= 1");
    if (cfg.answer_top_n < 1) throw PhaseError(EvalPhase::answer, "answer_top_n must be >= 1");
    if (cfg.parallelism < 1) throw PhaseError(EvalPhase::search, "parallelism must be >= 1");

    // INGEST
    if (!client.healthy())
        throw PhaseError(EvalPhase::ingest, "engine is not reachable / not healthy");
    for (const auto& conv : ds.conversations) {
        for (const auto& sess : conv.sessions) {
            try {
                client.ingest(conv.id, sess.id, sess.lines);
            } catch (const std::exception& e) {
                throw PhaseError(EvalPhase::ingest, "conversation " + conv.id + " session " +
                                                        sess.id + ": " + e.what());
            }
        }
    }

    // INDEXING
    for (const auto& conv : ds.conversations) {
        try {
            client.process(conv.id);
        } catch (const std::exception& e) {
            throw PhaseError(EvalPhase::indexing, "conversation " + conv.id + ": " + e.what());
        }
    }

    // SEARCH — parallel workers, results keyed by question index for
    // deterministic aggregation regardless of completion order.
    std::vector<Outcome> outcomes(ds.questions.size());
    std::vector<std::string> search_errors(ds.questions.size());
    {
        int workers = cfg.parallelism;
        if (std::size_t(workers) > ds.questions.size()) workers = int(ds.questions.size());
        if (workers < 1) workers = 1;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < ds.questions.size(); i += std::size_t(workers)) {
                    const EvalQuestion& q = ds.questions[i];
                    outcomes[i].q = &q;
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        outcomes[i].hits = client.search(q.conversation_id, q.text, cfg.k);
                    } catch (const std::exception& e) {
                        search_errors[i] = e.what();
                    }
                    outcomes[i].search_ms =
                        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                  t0)
                            .count();
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < search_errors.size(); ++i)
        if (!search_errors[i].empty())
            throw PhaseError(EvalPhase::search,
                             "question " + ds.questions[i].id + ": " + search_errors[i]);

    // ANSWER
    for (auto& o : outcomes) {
        std::string joined;
        const std::size_t n = std::min(o.hits.size(), std::size_t(cfg.answer_top_n));
        for (std::size_t i = 0; i < n; ++i) {
            if (!joined.empty()) joined += "\n";
            joined += o.hits[i].content;
        }
        if (cfg.answerer_mode == "extractive") {
            o.answer = joined;
        } else if (cfg.answerer_mode == "remote") {
            namespace fs = std::filesystem;
            std::string tmpl_path = cfg.prompts_dir + "/answer_" + o.q->question_type + ".txt";
            if (!fs::exists(tmpl_path)) tmpl_path = cfg.prompts_dir + "/answer_general.txt";
            std::string prompt = fill_prompt(read_file(tmpl_path),
                                             {{"question", o.q->text},
                                              {"speaker_1_user_id", o.q->conversation_id},
                                              {"speaker_2_user_id", o.q->conversation_id}},
                                             joined);
            try {
                auto reply = post_json("answerer", cfg.answerer_endpoint, {{"prompt", prompt}},
                                       cfg.remote_timeout_ms);
                o.answer = reply.at("text").get<std::string>();
            } catch (const std::exception& e) {
                throw PhaseError(EvalPhase::answer, "question " + o.q->id + ": " + e.what());
            }
        } else {
            throw PhaseError(EvalPhase::answer, "unknown answerer mode " + cfg.answerer_mode);
        }
    }

    // EVALUATE
    for (auto& o : outcomes) {
        const EvalQuestion& q = *o.q;
        o.tf1 = token_f1(o.answer, q.gold_answer);
        o.b1 = bleu1(o.answer, q.gold_answer);

        // snippet matching -> pseudo-id space (see header)
        std::vector<std::string> snippets;
        snippets.reserve(q.evidence_ids.size());
        for (const auto& eid : q.evidence_ids) {
            auto it = ds.evidence.find(eid);
            snippets.push_back(it == ds.evidence.end() ? std::string() : lower(it->second));
        }
        std::unordered_set<std::string> relevant;
        for (std::size_t j = 0; j < snippets.size(); ++j)
            relevant.insert("ev:" + std::to_string(j));
        std::vector<bool> claimed(snippets.size(), false);
        std::vector<std::string> transformed;
        transformed.reserve(o.hits.size());
        for (const auto& hit : o.hits) {
            std::string content = lower(hit.content);
            std::string mapped = "doc:" + hit.id;
            for (std::size_t j = 0; j < snippets.size(); ++j) {
                if (claimed[j] || snippets[j].empty()) continue;
                if (content.find(snippets[j]) != std::string::npos) {
                    claimed[j] = true;
                    mapped = "ev:" + std::to_string(j);
                    break;
                }
            }
            transformed.push_back(std::move(mapped));
        }
        o.rank = rank_metrics(transformed, relevant, cfg.k);

        if (cfg.judge_mode == "remote") {
            std::string prompt = fill_prompt(read_file(cfg.prompts_dir + "/judge.txt"),
                                             {{"question", q.text},
                                              {"gold_answer", q.gold_answer},
                                              {"generated_answer", o.answer}},
                                             "");
            try {
                auto reply = post_json("judge", cfg.judge_endpoint, {{"prompt", prompt}},
                                       cfg.remote_timeout_ms);
                std::string label = lower(reply.at("label").get<std::string>());
                o.judge_correct = label == "correct";
            } catch (const std::exception& e) {
                throw PhaseError(EvalPhase::evaluate, "question " + q.id + ": " + e.what());
            }
        } else if (cfg.judge_mode != "none") {
            throw PhaseError(EvalPhase::evaluate, "unknown judge mode " + cfg.judge_mode);
        }
    }

    // Aggregate in dataset order.
    Agg overall;
    std::map<std::string, Agg> per_type;
    nlohmann::json questions = nlohmann::json::array();
    std::vector<double> latencies;
    latencies.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        overall.add(o);
        per_type[o.q->question_type].add(o);
        latencies.push_back(o.search_ms);
        nlohmann::json retrieved = nlohmann::json::array();
        for (const auto& h : o.hits) retrieved.push_back(h.id);
        nlohmann::json jq{
            {"id", o.q->id},
            {"conversation_id", o.q->conversation_id},
            {"question_type", o.q->question_type},
            {"answer", o.answer},
            {"token_precision", o.tf1.precision},
            {"token_recall", o.tf1.recall},
            {"token_f1", o.tf1.f1},
            {"bleu1", o.b1},
            {"hit_at_k", o.rank.hit_at_k},
            {"mrr", o.rank.mrr},
            {"ndcg", o.rank.ndcg},
            {"precision_at_k", o.rank.precision},
            {"recall_at_k", o.rank.recall},
            {"f1_at_k", o.rank.f1},
            {"retrieved_ids", retrieved},
        };
        if (o.judge_correct) jq["judge_correct"] = *o.judge_correct;
        questions.push_back(std::move(jq));
    }
    nlohmann::json jtypes = nlohmann::json::object();
    for (const auto& [type, agg] : per_type) jtypes[type] = agg.to_json();

    EvalReport report;
    report.report = {
        {"config",
         {{"k", cfg.k},
          {"answer_top_n", cfg.answer_top_n},
          {"answerer_mode", cfg.answerer_mode},
          {"judge_mode", cfg.judge_mode}}},
        {"overall", overall.to_json()},
        {"per_type", jtypes},
        {"questions", questions},
    };

    std::sort(latencies.begin(), latencies.end());
    double sum = 0.0;
    for (double v : latencies) sum += v;
    report.latency_p50_ms = percentile(latencies, 0.50);
    report.latency_p95_ms = percentile(latencies, 0.95);
    report.latency_p99_ms = percentile(latencies, 0.99);
    report.latency_mean_ms = latencies.empty() ? 0.0 : sum / double(latencies.size());
    return report;
}

std::string render_table(const EvalReport& report) {
    const auto& rep = report.report;
    char line[256];
    std::string out;
    std::snprintf(line, sizeof(line), "%-16s %5s %7s %7s %7s %7s %7s %7s %7s %7s %7s\n", "type",
                  "n", "tokF1", "bleu1", "hit@k", "mrr", "ndcg", "p@k", "r@k", "f1@k", "judge");
    out += line;
    out += std::string(std::strlen(line) - 1, '-') + "\n";

    auto row = [&](const std::string& name, const nlohmann::json& g) {
        std::string judge = "-";
        if (g.contains("judge_score")) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.1f", g["judge_score"].get<double>());
            judge = buf;
        }
        std::snprintf(line, sizeof(line),
                      "%-16s %5d %7.3f %7.3f %7.3f %7.3f %7.3f %7.3f %7.3f %7.3f %7s\n",
                      name.c_str(), g["count"].get<int>(), g["token_f1"].get<double>(),
                      g["bleu1"].get<double>(), g["hit_at_k"].get<double>(),
                      g["mrr"].get<double>(), g["ndcg"].get<double>(),
                      g["precision_at_k"].get<double>(), g["recall_at_k"].get<double>(),
                      g["f1_at_k"].get<double>(), judge.c_str());
        out += line;
    };
    for (const auto& [type, g] : rep["per_type"].items()) row(type, g);
    row("overall", rep["overall"]);
    std::snprintf(line, sizeof(line),
                  "search latency: p50=%.2fms p95=%.2fms p99=%.2fms mean=%.2fms\n",
                  report.latency_p50_ms, report.latency_p95_ms, report.latency_p99_ms,
                  report.latency_mean_ms);
    out += line;
    return out;
}

void write_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot open report path: " + path);
    out << report.report.dump(2) << "\n";
    if (!out) throw Error("failed writing report: " + path);
}

}  // namespace mnemo::eval
