#include "mnemo/service.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

#include "mnemo/errors.hpp"
#include "mnemo/json_io.hpp"

namespace mnemo {

namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code,
                 const std::string& message) {
    reply_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

// Maps library errors onto HTTP statuses; everything unexpected is a 500.
void handle_errors(httplib::Response& res, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const MalformedLineError& e) {
        reply_error(res, 400, "malformed_line", e.what());
    } catch (const EmptyQueryError& e) {
        reply_error(res, 400, "empty_query", e.what());
    } catch (const InvalidArgumentError& e) {
        reply_error(res, 400, "invalid_argument", e.what());
    } catch (const NotFoundError& e) {
        reply_error(res, 404, "not_found", e.what());
    } catch (const RemoteError& e) {
        reply_error(res, 502, e.component + "_unavailable", e.what());
    } catch (const ConfigError& e) {
        reply_error(res, 500, "config_error", e.what());
    } catch (const std::exception& e) {
        reply_error(res, 500, "internal", e.what());
    }
}

nlohmann::json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw InvalidArgumentError("request body must be a JSON object");
    return j;
}

std::optional<UtcSeconds> parse_now(const nlohmann::json& body) {
    if (!body.contains("now") || body["now"].is_null()) return std::nullopt;
    if (!body["now"].is_string())
        throw InvalidArgumentError("now must be an ISO-8601 string");
    auto t = parse_iso8601(body["now"].get<std::string>());
    if (!t) throw InvalidArgumentError("now must look like 2024-05-10T00:00:00Z");
    return t;
}

constexpr const char* kOwnerPattern = R"(([A-Za-z0-9._\-]+))";

}  // namespace

MemoryService::MemoryService(ServiceConfig cfg) : MemoryService(std::move(cfg), nullptr) {}

MemoryService::MemoryService(ServiceConfig cfg, std::unique_ptr<MemoryEngine> engine)
    : cfg_(std::move(cfg)), engine_(std::move(engine)) {
    cfg_.validate();
    if (!engine_) engine_ = make_engine(cfg_);
    server_ = std::make_unique<httplib::Server>();
    install_routes();
}

MemoryService::~MemoryService() {
    stop();
}

void MemoryService::install_routes() {
    auto& svr = *server_;

    svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, 200, {{"status", "ok"}});
    });

    svr.Post(std::string("/v1/") + kOwnerPattern + "/messages",
             [this](const httplib::Request& req, httplib::Response& res) {
                 handle_errors(res, [&] {
                     auto body = parse_body(req);
                     if (!body.contains("session_id") || !body["session_id"].is_string())
                         throw InvalidArgumentError("session_id (string) is required");
                     if (!body.contains("lines") || !body["lines"].is_array())
                         throw InvalidArgumentError("lines (array of strings) is required");
                     std::vector<std::string> lines;
                     lines.reserve(body["lines"].size());
                     for (const auto& l : body["lines"]) {
                         if (!l.is_string())
                             throw InvalidArgumentError("lines must contain only strings");
                         lines.push_back(l.get<std::string>());
                     }
                     const std::string owner = req.matches[1];
                     const std::string session = body["session_id"].get<std::string>();

                     std::vector<std::string> ids;
                     bool replayed = false;
                     std::string key;
                     if (req.has_header("Idempotency-Key"))
                         key = req.get_header_value("Idempotency-Key");
                     if (!key.empty()) {
                         auto [got, was_replay] =
                             engine_->ingest_idempotent(owner, session, lines, key);
                         ids = std::move(got);
                         replayed = was_replay;
                     } else {
                         for (const auto& rec : engine_->ingest(owner, session, lines))
                             ids.push_back(rec.id);
                     }
                     reply_json(res, 200,
                                {{"message_ids", ids},
                                 {"count", ids.size()},
                                 {"replayed", replayed}});
                 });
             });

    svr.Post(std::string("/v1/") + kOwnerPattern + "/process",
             [this](const httplib::Request& req, httplib::Response& res) {
                 handle_errors(res, [&] {
                     auto body = parse_body(req);
                     auto now = parse_now(body);
                     const std::string owner = req.matches[1];
                     ProcessResult r = engine_->process_pending(owner, now);
                     nlohmann::json errors = nlohmann::json::array();
                     for (const auto& e : r.errors)
                         errors.push_back({{"op_index", e.op_index},
                                           {"code", e.code},
                                           {"message", e.message}});
                     reply_json(res, 200,
                                {{"added", r.added},
                                 {"updated", r.updated},
                                 {"deleted", r.deleted},
                                 {"skipped", r.skipped},
                                 {"batches", r.batches},
                                 {"errors", errors}});
                 });
             });

    svr.Post(std::string("/v1/") + kOwnerPattern + "/search",
             [this](const httplib::Request& req, httplib::Response& res) {
                 handle_errors(res, [&] {
                     auto body = parse_body(req);
                     if (!body.contains("query") || !body["query"].is_string())
                         throw InvalidArgumentError("query (string) is required");
                     SearchOptions opts;
                     if (body.contains("k")) {
                         if (!body["k"].is_number_integer() || body["k"].get<long long>() < 1)
                             throw InvalidArgumentError("k must be an integer >= 1");
                         opts.k = body["k"].get<std::size_t>();
                     }
                     if (body.contains("include_historical") &&
                         !body["include_historical"].is_null()) {
                         if (!body["include_historical"].is_boolean())
                             throw InvalidArgumentError("include_historical must be a boolean");
                         opts.historical_override = body["include_historical"].get<bool>();
                     }
                     if (body.contains("include_timings"))
                         opts.include_timings = body["include_timings"].get<bool>();
                     opts.now = parse_now(body);

                     const std::string owner = req.matches[1];
                     SearchResult r =
                         engine_->search(owner, body["query"].get<std::string>(), opts);

                     nlohmann::json hits = nlohmann::json::array();
                     for (const auto& h : r.hits)
                         hits.push_back(to_json(h, r.analysis.include_historical));
                     nlohmann::json out{{"hits", hits},
                                        {"analysis", to_json(r.analysis)},
                                        {"reranker_degraded", r.reranker_degraded}};
                     if (r.timings) out["timings"] = to_json(*r.timings);
                     reply_json(res, 200, out);
                 });
             });

    svr.Get(std::string("/v1/") + kOwnerPattern + "/memories/" + kOwnerPattern + "/history",
            [this](const httplib::Request& req, httplib::Response& res) {
                handle_errors(res, [&] {
                    auto chain = engine_->history(req.matches[1], req.matches[2]);
                    nlohmann::json jchain = nlohmann::json::array();
                    for (const auto& rec : chain) jchain.push_back(to_json(rec));
                    reply_json(res, 200, {{"chain", jchain}, {"length", jchain.size()}});
                });
            });
}

bool MemoryService::listen() {
    if (cfg_.port == 0) {
        port_ = server_->bind_to_any_port(cfg_.host);
        if (port_ <= 0) return false;
        return server_->listen_after_bind();
    }
    port_ = cfg_.port;
    return server_->listen(cfg_.host, cfg_.port);
}

void MemoryService::stop() {
    if (server_) server_->stop();
}

bool MemoryService::wait_until_ready(int timeout_ms) const {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (std::chrono::steady_clock::now() < deadline) {
        if (server_->is_running()) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return server_->is_running();
}

}  // namespace mnemo
