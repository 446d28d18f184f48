// mnemo CLI: serve the HTTP API or drive a store directly from the shell.
//
// Local subcommands (ingest/process/search/history) open the store named by
// --config / MNEMO_DATA_DIR in-process; pass --server to talk to a running
// service instead. Never point both a server and a local command at the same
// data directory at once.

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mnemo/engine.hpp"
#include "mnemo/errors.hpp"
#include "mnemo/eval/harness.hpp"
#include "mnemo/json_io.hpp"
#include "mnemo/remote.hpp"
#include "mnemo/service.hpp"
#include "mnemo/service_config.hpp"

namespace {

std::atomic<int> g_signal{0};
std::mutex g_sig_mtx;
std::condition_variable g_sig_cv;

void on_signal(int sig) {
    g_signal.store(sig);
    g_sig_cv.notify_one();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mnemo::Error("cannot open transcript file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void print_json(const nlohmann::json& j) {
    std::cout << j.dump(2) << "\n";
}

// POSTs to a running service and prints the response; non-2xx exits 1.
int call_server(const std::string& base, const std::string& path, const nlohmann::json& body) {
    auto reply = mnemo::post_json("server", base + path, body, 30000);
    print_json(reply);
    return 0;
}

int run_serve(const std::string& config_path) {
    auto cfg = mnemo::ServiceConfig::load(config_path);
    mnemo::MemoryService service(cfg);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread watcher([&service] {
        std::unique_lock lk(g_sig_mtx);
        g_sig_cv.wait(lk, [] { return g_signal.load() != 0; });
        service.stop();
    });

    std::cerr << "mnemo: listening on " << cfg.host << ":" << cfg.port << "\n";
    bool ok = service.listen();
    int sig = g_signal.load();
    if (sig == 0) {
        // listen() failed or returned on its own; unblock the watcher.
        on_signal(-1);
    }
    watcher.join();
    if (sig == SIGTERM) {
        std::cerr << "mnemo: SIGTERM, snapshotting before exit\n";
        service.engine().snapshot_now();
    }
    if (!ok && sig == 0) {
        std::cerr << "mnemo: failed to bind " << cfg.host << ":" << cfg.port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mnemo — conversational memory service"};
    app.require_subcommand(1);

    std::string config_path;
    std::string server_url;
    std::string owner, session, file, query, memory_id;
    std::size_t k = 5;
    bool historical = false;

    auto add_common = [&](CLI::App* cmd, bool with_server) {
        cmd->add_option("--config", config_path, "JSON config file (env vars override)");
        if (with_server)
            cmd->add_option("--server", server_url,
                            "base URL of a running service (use HTTP instead of the local store)");
    };

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    add_common(serve, false);

    auto* ingest = app.add_subcommand("ingest", "store a transcript file");
    add_common(ingest, true);
    ingest->add_option("--owner", owner, "owner id")->required();
    ingest->add_option("--session", session, "session id")->required();
    ingest->add_option("--file", file, "transcript file, one [timestamp] Speaker: text per line")
        ->required();

    auto* process = app.add_subcommand("process", "extract memories from pending messages");
    add_common(process, true);
    process->add_option("--owner", owner, "owner id")->required();

    auto* search = app.add_subcommand("search", "query the memory store");
    add_common(search, true);
    search->add_option("--owner", owner, "owner id")->required();
    search->add_option("--query", query, "query text")->required();
    search->add_option("--k", k, "results to return");
    search->add_flag("--historical", historical, "include superseded versions");

    auto* history = app.add_subcommand("history", "print a memory's version chain");
    add_common(history, true);
    history->add_option("--owner", owner, "owner id")->required();
    history->add_option("--memory-id", memory_id, "any id in the chain")->required();

    auto* eval = app.add_subcommand("eval", "evaluation harness");
    auto* eval_run = eval->add_subcommand("run", "run the 5-phase benchmark");
    std::string dataset_path, engine_url, report_path;
    mnemo::eval::EvalConfig ecfg;
    eval_run->add_option("--dataset", dataset_path, "dataset JSON file")->required();
    eval_run->add_option("--engine", engine_url, "base URL of the engine under test")->required();
    eval_run->add_option("--report", report_path, "where to write the JSON report")->required();
    eval_run->add_option("--k", ecfg.k, "retrieval depth");
    eval_run->add_option("--answer-top-n", ecfg.answer_top_n, "hits fed to the answerer");
    eval_run->add_option("--parallelism", ecfg.parallelism, "search-phase worker threads");
    eval_run->add_option("--answerer", ecfg.answerer_mode, "extractive | remote")
        ->check(CLI::IsMember({"extractive", "remote"}));
    eval_run->add_option("--answerer-endpoint", ecfg.answerer_endpoint, "remote answerer URL");
    eval_run->add_option("--judge", ecfg.judge_mode, "none | remote")
        ->check(CLI::IsMember({"none", "remote"}));
    eval_run->add_option("--judge-endpoint", ecfg.judge_endpoint, "remote judge URL");
    eval_run->add_option("--prompts", ecfg.prompts_dir, "prompt template directory");
    eval_run->add_option("--timeout-ms", ecfg.remote_timeout_ms, "remote call timeout");
    eval->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) return run_serve(config_path);

        if (eval_run->parsed()) {
            if (ecfg.answerer_mode == "remote" && ecfg.answerer_endpoint.empty())
                throw mnemo::ConfigError("--answerer remote needs --answerer-endpoint");
            if (ecfg.judge_mode == "remote" && ecfg.judge_endpoint.empty())
                throw mnemo::ConfigError("--judge remote needs --judge-endpoint");
            auto ds = mnemo::eval::load_dataset(dataset_path);
            mnemo::eval::HttpEngineClient client(engine_url, ecfg.remote_timeout_ms);
            auto report = mnemo::eval::run_eval(ds, client, ecfg);
            mnemo::eval::write_report(report, report_path);
            std::cout << mnemo::eval::render_table(report);
            return 0;
        }

        if (!server_url.empty()) {
            if (ingest->parsed())
                return call_server(server_url, "/v1/" + owner + "/messages",
                                   {{"session_id", session}, {"lines", read_lines(file)}});
            if (process->parsed())
                return call_server(server_url, "/v1/" + owner + "/process",
                                   nlohmann::json::object());
            if (search->parsed()) {
                nlohmann::json body{{"query", query}, {"k", k}};
                if (historical) body["include_historical"] = true;
                return call_server(server_url, "/v1/" + owner + "/search", body);
            }
            if (history->parsed()) {
                httplib::Client cli(server_url);
                auto res = cli.Get("/v1/" + owner + "/memories/" + memory_id + "/history");
                if (!res) throw mnemo::RemoteError("server", "no response from " + server_url);
                print_json(nlohmann::json::parse(res->body));
                return res->status == 200 ? 0 : 1;
            }
        }

        auto cfg = mnemo::ServiceConfig::load(config_path);
        auto engine = mnemo::make_engine(cfg);

        if (ingest->parsed()) {
            auto records = engine->ingest(owner, session, read_lines(file));
            nlohmann::json ids = nlohmann::json::array();
            for (const auto& rec : records) ids.push_back(rec.id);
            print_json({{"message_ids", ids}, {"count", records.size()}});
        } else if (process->parsed()) {
            auto r = engine->process_pending(owner);
            nlohmann::json errors = nlohmann::json::array();
            for (const auto& e : r.errors)
                errors.push_back(
                    {{"op_index", e.op_index}, {"code", e.code}, {"message", e.message}});
            print_json({{"added", r.added},
                        {"updated", r.updated},
                        {"deleted", r.deleted},
                        {"skipped", r.skipped},
                        {"batches", r.batches},
                        {"errors", errors}});
        } else if (search->parsed()) {
            mnemo::SearchOptions opts;
            opts.k = k;
            if (historical) opts.historical_override = true;
            auto r = engine->search(owner, query, opts);
            nlohmann::json hits = nlohmann::json::array();
            for (const auto& h : r.hits)
                hits.push_back(mnemo::to_json(h, r.analysis.include_historical));
            print_json({{"hits", hits},
                        {"analysis", mnemo::to_json(r.analysis)},
                        {"reranker_degraded", r.reranker_degraded}});
        } else if (history->parsed()) {
            auto chain = engine->history(owner, memory_id);
            nlohmann::json jchain = nlohmann::json::array();
            for (const auto& rec : chain) jchain.push_back(mnemo::to_json(rec));
            print_json({{"chain", jchain}, {"length", jchain.size()}});
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "mnemo: " << e.what() << "\n";
        return 1;
    }
}
