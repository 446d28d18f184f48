// The HTTP surface: route wiring, request validation, error mapping and the
// idempotency header, against a real server socket on an ephemeral port.

#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "mnemo/service.hpp"

using namespace mnemo;
using nlohmann::json;

namespace {

// Starts the service on 127.0.0.1:0 and tears it down with the test.
struct LiveService {
    MemoryService service;
    std::thread runner;

    explicit LiveService(ServiceConfig cfg = make_config()) : service(std::move(cfg)) {
        runner = std::thread([this] { service.listen(); });
        REQUIRE(service.wait_until_ready());
    }
    ~LiveService() {
        service.stop();
        runner.join();
    }

    static ServiceConfig make_config() {
        ServiceConfig cfg;
        cfg.port = 0;
        return cfg;
    }

    httplib::Client client() {
        httplib::Client c("127.0.0.1", service.port());
        c.set_read_timeout(10, 0);
        return c;
    }
};

json body_of(const httplib::Result& res) {
    REQUIRE(res);
    return json::parse(res->body);
}

}  // namespace

TEST_CASE("healthz answers without any state") {
    LiveService live;
    auto client = live.client();
    auto res = client.Get("/healthz");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(body_of(res)["status"] == "ok");
}

TEST_CASE("posting messages stores them and honors the idempotency header") {
    LiveService live;
    auto client = live.client();
    json req{{"session_id", "s1"},
             {"lines", {"[2024-05-01 09:00:00] James: I live in Lisbon.",
                        "[2024-05-01 09:00:10] James: My favorite tea is sencha."}}};

    httplib::Headers key{{"Idempotency-Key", "abc-123"}};
    auto first = client.Post("/v1/james/messages", key, req.dump(), "application/json");
    REQUIRE(first);
    CHECK(first->status == 200);
    json b1 = body_of(first);
    CHECK(b1["count"] == 2);
    CHECK(b1["replayed"] == false);
    REQUIRE(b1["message_ids"].size() == 2);

    auto second = client.Post("/v1/james/messages", key, req.dump(), "application/json");
    json b2 = body_of(second);
    CHECK(b2["replayed"] == true);
    CHECK(b2["message_ids"] == b1["message_ids"]);

    // same payload, no key: stored again as new messages
    auto third = client.Post("/v1/james/messages", req.dump(), "application/json");
    json b3 = body_of(third);
    CHECK(b3["replayed"] == false);
    CHECK(b3["message_ids"] != b1["message_ids"]);
}

TEST_CASE("message validation failures are 400s with stable codes") {
    LiveService live;
    auto client = live.client();

    auto no_session = client.Post("/v1/james/messages",
                                  json{{"lines", json::array()}}.dump(), "application/json");
    REQUIRE(no_session);
    CHECK(no_session->status == 400);
    CHECK(body_of(no_session)["error"]["code"] == "invalid_argument");

    auto bad_lines = client.Post("/v1/james/messages",
                                 json{{"session_id", "s"}, {"lines", "nope"}}.dump(),
                                 "application/json");
    CHECK(bad_lines->status == 400);

    json malformed{{"session_id", "s"},
                   {"lines", {"[2024-05-01 09:00:00] James: Fine.", "garbage line"}}};
    auto bad_line = client.Post("/v1/james/messages", malformed.dump(), "application/json");
    CHECK(bad_line->status == 400);
    json err = body_of(bad_line)["error"];
    CHECK(err["code"] == "malformed_line");
    CHECK(err["message"].get<std::string>().find("line 2") != std::string::npos);

    auto not_json = client.Post("/v1/james/messages", "][", "application/json");
    CHECK(not_json->status == 400);
}

TEST_CASE("process extracts memories and search finds them") {
    LiveService live;
    auto client = live.client();
    json ingest{{"session_id", "s1"},
                {"lines", {"[2024-05-01 09:00:00] James: I work as a Software Engineer.",
                           "[2024-05-01 09:00:10] James: I am allergic to shellfish."}}};
    client.Post("/v1/james/messages", ingest.dump(), "application/json");

    auto processed = client.Post("/v1/james/process", "{}", "application/json");
    REQUIRE(processed);
    CHECK(processed->status == 200);
    json pb = body_of(processed);
    CHECK(pb["added"] == 2);
    CHECK(pb["batches"] == 1);
    CHECK(pb["errors"].empty());

    json search{{"query", "allergic"}, {"k", 3}, {"now", "2024-05-10T12:00:00Z"}};
    auto found = client.Post("/v1/james/search", search.dump(), "application/json");
    REQUIRE(found);
    CHECK(found->status == 200);
    json fb = body_of(found);
    REQUIRE_FALSE(fb["hits"].empty());
    CHECK(fb["hits"][0]["content"] == "James is allergic to shellfish");
    CHECK(fb["reranker_degraded"] == false);
    CHECK(fb["analysis"]["temporal_intent"] == false);
    // non-historical responses omit version bookkeeping and timings
    CHECK_FALSE(fb["hits"][0].contains("version"));
    CHECK_FALSE(fb.contains("timings"));
}

TEST_CASE("search validates its body and reports analysis extras on demand") {
    LiveService live;
    auto client = live.client();

    auto no_query = client.Post("/v1/james/search", "{}", "application/json");
    CHECK(no_query->status == 400);
    CHECK(body_of(no_query)["error"]["code"] == "invalid_argument");

    auto zero_k = client.Post("/v1/james/search",
                              json{{"query", "tea"}, {"k", 0}}.dump(), "application/json");
    CHECK(zero_k->status == 400);

    auto bad_flag = client.Post(
        "/v1/james/search",
        json{{"query", "tea"}, {"include_historical", "yes"}}.dump(), "application/json");
    CHECK(bad_flag->status == 400);

    auto bad_now = client.Post("/v1/james/search",
                               json{{"query", "tea"}, {"now", "noon-ish"}}.dump(),
                               "application/json");
    CHECK(bad_now->status == 400);

    auto empty_query = client.Post("/v1/james/search", json{{"query", "?!"}}.dump(),
                                   "application/json");
    CHECK(empty_query->status == 400);
    CHECK(body_of(empty_query)["error"]["code"] == "empty_query");

    // unknown owner is an empty result set, not an error
    auto empty = client.Post("/v1/nobody/search", json{{"query", "tea"}}.dump(),
                             "application/json");
    CHECK(empty->status == 200);
    CHECK(body_of(empty)["hits"].empty());

    // timings appear only when asked for
    auto timed = client.Post(
        "/v1/nobody/search",
        json{{"query", "tea"}, {"include_timings", true}}.dump(), "application/json");
    json tb = body_of(timed);
    REQUIRE(tb.contains("timings"));
    CHECK(tb["timings"].contains("total_us"));
}

TEST_CASE("history returns the chain and 404s on unknown ids") {
    LiveService live;
    auto client = live.client();

    json s1{{"session_id", "s1"},
            {"lines", {"[2024-03-01 10:00:00] James: I work as a Software Engineer."}}};
    client.Post("/v1/james/messages", s1.dump(), "application/json");
    client.Post("/v1/james/process", "{}", "application/json");
    json s2{{"session_id", "s2"},
            {"lines", {"[2024-06-01 10:00:00] James: I work as a Tech Lead now."}}};
    client.Post("/v1/james/messages", s2.dump(), "application/json");
    client.Post("/v1/james/process", "{}", "application/json");

    // find the current memory id via historical search (which carries version info)
    json search{{"query", "james job role"}, {"k", 10}, {"include_historical", true},
                {"now", "2024-06-02T00:00:00Z"}};
    json fb = body_of(client.Post("/v1/james/search", search.dump(), "application/json"));
    REQUIRE(fb["hits"].size() == 2);
    CHECK(fb["hits"][0].contains("version"));  // historical responses carry versions
    std::string any_id = fb["hits"][0]["memory_id"].get<std::string>();

    auto hist = client.Get("/v1/james/memories/" + any_id + "/history");
    REQUIRE(hist);
    CHECK(hist->status == 200);
    json hb = body_of(hist);
    CHECK(hb["length"] == 2);
    REQUIRE(hb["chain"].size() == 2);
    CHECK(hb["chain"][0]["version"] == 1);
    CHECK(hb["chain"][0]["content"] == "James works as Software Engineer");
    CHECK(hb["chain"][1]["version"] == 2);
    CHECK(hb["chain"][1]["is_current"] == true);
    CHECK(hb["chain"][1]["replaces_id"] == hb["chain"][0]["id"]);

    auto missing = client.Get("/v1/james/memories/424242/history");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(body_of(missing)["error"]["code"] == "not_found");
}

TEST_CASE("a dead remote extractor surfaces as 502, leaving messages pending") {
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.extractor_mode = "remote";
    cfg.extractor_endpoint = "http://127.0.0.1:1";  // nothing listens there
    cfg.extractor_timeout_ms = 200;
    LiveService live(cfg);
    auto client = live.client();

    json ingest{{"session_id", "s1"},
                {"lines", {"[2024-05-01 09:00:00] James: I live in Lisbon."}}};
    CHECK(body_of(client.Post("/v1/james/messages", ingest.dump(), "application/json"))["count"] ==
          1);

    auto processed = client.Post("/v1/james/process", "{}", "application/json");
    REQUIRE(processed);
    CHECK(processed->status == 502);
    CHECK(body_of(processed)["error"]["code"] == "extractor_unavailable");

    // nothing was consumed; the engine can retry later
    CHECK(live.service.engine().pending_count("james") == 1);
}

TEST_CASE("owner ids outside the allowed pattern never reach a handler") {
    LiveService live;
    auto client = live.client();
    auto res = client.Post("/v1/bad%20owner!/search", json{{"query", "x"}}.dump(),
                           "application/json");
    REQUIRE(res);
    CHECK(res->status == 404);
}
