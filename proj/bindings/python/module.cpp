// Thin pybind11 layer. Structured values cross as JSON strings; the mnemo
// Python package parses them into plain dicts/lists, which keeps this file
// free of hand-written converters.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "mnemo/engine.hpp"
#include "mnemo/errors.hpp"
#include "mnemo/eval/metrics.hpp"
#include "mnemo/json_io.hpp"
#include "mnemo/query_analysis.hpp"
#include "mnemo/service_config.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

mnemo::UtcSeconds parse_now_arg(const std::string& iso) {
    auto t = mnemo::parse_iso8601(iso);
    if (!t) throw mnemo::InvalidArgumentError("now must look like 2024-05-10T00:00:00Z");
    return *t;
}

class PyEngine {
public:
    explicit PyEngine(const std::string& config_json) {
        mnemo::ServiceConfig cfg;
        if (!config_json.empty()) cfg = mnemo::ServiceConfig::from_json(json::parse(config_json));
        cfg.validate();
        engine_ = mnemo::make_engine(cfg);
    }

    std::vector<std::string> ingest(const std::string& owner, const std::string& session,
                                    const std::vector<std::string>& lines) {
        std::vector<std::string> ids;
        for (const auto& rec : engine_->ingest(owner, session, lines)) ids.push_back(rec.id);
        return ids;
    }

    std::string process(const std::string& owner, const std::string& now_iso) {
        std::optional<mnemo::UtcSeconds> now;
        if (!now_iso.empty()) now = parse_now_arg(now_iso);
        auto r = engine_->process_pending(owner, now);
        json errors = json::array();
        for (const auto& e : r.errors)
            errors.push_back({{"op_index", e.op_index}, {"code", e.code}, {"message", e.message}});
        return json{{"added", r.added},           {"updated", r.updated},
                    {"deleted", r.deleted},       {"skipped", r.skipped},
                    {"batches", r.batches},       {"errors", errors}}
            .dump();
    }

    std::string search(const std::string& owner, const std::string& query, std::size_t k,
                       int historical, const std::string& now_iso, bool include_timings) {
        mnemo::SearchOptions opts;
        opts.k = k;
        if (historical >= 0) opts.historical_override = historical != 0;
        if (!now_iso.empty()) opts.now = parse_now_arg(now_iso);
        opts.include_timings = include_timings;
        auto r = engine_->search(owner, query, opts);
        json hits = json::array();
        for (const auto& h : r.hits) hits.push_back(to_json(h, r.analysis.include_historical));
        json out{{"hits", hits},
                 {"analysis", to_json(r.analysis)},
                 {"reranker_degraded", r.reranker_degraded}};
        if (r.timings) out["timings"] = to_json(*r.timings);
        return out.dump();
    }

    std::string history(const std::string& owner, const std::string& memory_id) {
        json chain = json::array();
        for (const auto& rec : engine_->history(owner, memory_id)) chain.push_back(to_json(rec));
        return chain.dump();
    }

    std::string immediate_recall(const std::string& owner, const std::string& query,
                                 std::size_t k) {
        json out = json::array();
        for (const auto& [rec, score] : engine_->immediate_recall(owner, query, k)) {
            json item = to_json(rec);
            item["score"] = score;
            out.push_back(std::move(item));
        }
        return out.dump();
    }

    std::string memories(const std::string& owner) {
        json out = json::array();
        for (const auto& rec : engine_->memories(owner)) out.push_back(to_json(rec));
        return out.dump();
    }

    std::string messages(const std::string& owner) {
        json out = json::array();
        for (const auto& rec : engine_->messages(owner)) out.push_back(to_json(rec));
        return out.dump();
    }

    std::size_t pending_count(const std::string& owner) { return engine_->pending_count(owner); }
    std::vector<std::string> owners() { return engine_->owners(); }
    void snapshot() { engine_->snapshot_now(); }

private:
    std::unique_ptr<mnemo::MemoryEngine> engine_;
};

std::string analyze_query_json(const std::string& query, const std::string& now_iso) {
    auto now = now_iso.empty() ? std::chrono::floor<std::chrono::seconds>(
                                     std::chrono::system_clock::now())
                               : parse_now_arg(now_iso);
    return mnemo::to_json(mnemo::analyze_query(query, now, mnemo::TemporalConfig{})).dump();
}

}  // namespace

PYBIND11_MODULE(_mnemo, m) {
    m.doc() = "conversational memory engine (C++ core)";

    // Translators run newest-first, so the base class must be registered
    // before the derived one or it would shadow NotFoundError.
    py::register_exception<mnemo::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<mnemo::NotFoundError>(m, "NotFoundError", PyExc_KeyError);

    py::class_<PyEngine>(m, "Engine")
        .def(py::init<const std::string&>(), py::arg("config_json") = "")
        .def("ingest", &PyEngine::ingest, py::arg("owner"), py::arg("session"), py::arg("lines"),
             py::call_guard<py::gil_scoped_release>())
        .def("process_json", &PyEngine::process, py::arg("owner"), py::arg("now") = "",
             py::call_guard<py::gil_scoped_release>())
        .def("search_json", &PyEngine::search, py::arg("owner"), py::arg("query"),
             py::arg("k") = 5, py::arg("historical") = -1, py::arg("now") = "",
             py::arg("include_timings") = false, py::call_guard<py::gil_scoped_release>())
        .def("history_json", &PyEngine::history, py::arg("owner"), py::arg("memory_id"),
             py::call_guard<py::gil_scoped_release>())
        .def("immediate_recall_json", &PyEngine::immediate_recall, py::arg("owner"),
             py::arg("query"), py::arg("k") = 5, py::call_guard<py::gil_scoped_release>())
        .def("memories_json", &PyEngine::memories, py::arg("owner"))
        .def("messages_json", &PyEngine::messages, py::arg("owner"))
        .def("pending_count", &PyEngine::pending_count, py::arg("owner"))
        .def("owners", &PyEngine::owners)
        .def("snapshot", &PyEngine::snapshot, py::call_guard<py::gil_scoped_release>());

    m.def("analyze_query_json", &analyze_query_json, py::arg("query"), py::arg("now") = "");

    m.def(
        "token_f1",
        [](const std::string& predicted, const std::string& gold) {
            return mnemo::eval::token_f1(predicted, gold).f1;
        },
        py::arg("predicted"), py::arg("gold"));
    m.def("bleu1", &mnemo::eval::bleu1, py::arg("predicted"), py::arg("gold"));
    m.def(
        "rank_metrics_json",
        [](const std::vector<std::string>& retrieved, const std::vector<std::string>& relevant,
           std::size_t k) {
            auto r = mnemo::eval::rank_metrics(
                retrieved, {relevant.begin(), relevant.end()}, k);
            return json{{"hit_at_k", r.hit_at_k},   {"mrr", r.mrr},
                        {"ndcg", r.ndcg},           {"precision_at_k", r.precision},
                        {"recall_at_k", r.recall},  {"f1_at_k", r.f1}}
                .dump();
        },
        py::arg("retrieved"), py::arg("relevant"), py::arg("k") = 5);
}
