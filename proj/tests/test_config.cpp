// Configuration: shipped defaults, the nested JSON schema, environment
// overrides and validation. The defaults block doubles as a regression pin on
// every tuning constant the ranking pipeline depends on.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "mnemo/errors.hpp"
#include "mnemo/service_config.hpp"

using namespace mnemo;
namespace fs = std::filesystem;

namespace {

// setenv/unsetenv pairs that always restore, even on CHECK failure
struct EnvGuard {
    std::vector<std::string> names;
    void set(const std::string& name, const std::string& value) {
        ::setenv(name.c_str(), value.c_str(), 1);
        names.push_back(name);
    }
    ~EnvGuard() {
        for (const auto& n : names) ::unsetenv(n.c_str());
    }
};

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& contents) {
        path = fs::temp_directory_path() /
               ("mnemo-cfg-" + std::to_string(std::rand()) + ".json");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("shipped defaults pin every tuning constant") {
    ServiceConfig cfg;

    CHECK(cfg.host == "127.0.0.1");
    CHECK(cfg.port == 7040);
    CHECK(cfg.data_dir.empty());
    CHECK(cfg.engine.retrieve_context_n == 10);
    CHECK(cfg.engine.snapshot_interval == 500);

    const FusionConfig& f = cfg.engine.fusion;
    CHECK(f.k_rrf == 10);
    CHECK(f.w_vector == 0.70);
    CHECK(f.w_bm25 == 0.30);
    CHECK(f.candidate_depth == 50);
    CHECK(f.shortlist_size == 200);
    CHECK(f.rerank_top_n == 50);
    CHECK(f.dedup_threshold == 0.99);

    const TemporalConfig& t = cfg.engine.temporal;
    CHECK(t.w_fused == 0.60);
    CHECK(t.w_temporal == 0.40);
    CHECK(t.floor == 0.1);
    CHECK(t.window_table.at(TemporalClass::explicit_date) == 3.0);
    CHECK(t.window_table.at(TemporalClass::day_relative) == 2.0);
    CHECK(t.window_table.at(TemporalClass::last_week) == 10.0);
    CHECK(t.window_table.at(TemporalClass::last_month) == 35.0);
    CHECK(t.window_table.at(TemporalClass::last_year) == 370.0);
    CHECK(t.window_table.at(TemporalClass::generic) == 30.0);

    CHECK(cfg.embedder_mode == "reference");
    CHECK(cfg.embedder_seed == 42);
    CHECK(cfg.embedder_timeout_ms == 2000);
    CHECK(cfg.extractor_mode == "rule");
    CHECK(cfg.extractor_timeout_ms == 5000);
    CHECK(cfg.extractor_update_threshold == 0.95);
    CHECK(cfg.assistant_speaker == "Assistant");
    CHECK(cfg.reranker_mode == "passthrough");
    CHECK(cfg.reranker_timeout_ms == 2000);

    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("from_json reads the nested schema") {
    auto j = nlohmann::json::parse(R"({
        "listen": {"host": "0.0.0.0", "port": 9001},
        "data_dir": "/tmp/mnemo-data",
        "snapshot_interval": 25,
        "retrieve_context_n": 4,
        "fusion": {
            "k_rrf": 60, "w_vector": 0.5, "w_bm25": 0.5,
            "candidate_depth": 80, "shortlist_size": 300,
            "rerank_top_n": 20, "dedup_threshold": 0.95
        },
        "temporal": {
            "w_fused": 0.7, "w_temporal": 0.3, "floor": 0.05,
            "windows": {"explicit_date": 5.0, "last_year": 400.0}
        },
        "embedder": {"mode": "remote", "seed": 7, "endpoint": "http://emb:9000",
                     "timeout_ms": 750},
        "extractor": {"mode": "remote", "endpoint": "http://ext:9100",
                      "timeout_ms": 1500, "update_threshold": 0.9,
                      "assistant_speaker": "Bot"},
        "reranker": {"mode": "remote", "endpoint": "http://rr:9200", "timeout_ms": 900}
    })");
    ServiceConfig cfg = ServiceConfig::from_json(j);

    CHECK(cfg.host == "0.0.0.0");
    CHECK(cfg.port == 9001);
    CHECK(cfg.data_dir == "/tmp/mnemo-data");
    CHECK(cfg.engine.snapshot_interval == 25);
    CHECK(cfg.engine.retrieve_context_n == 4);
    CHECK(cfg.engine.fusion.k_rrf == 60);
    CHECK(cfg.engine.fusion.w_vector == 0.5);
    CHECK(cfg.engine.fusion.shortlist_size == 300);
    CHECK(cfg.engine.fusion.dedup_threshold == 0.95);
    CHECK(cfg.engine.temporal.w_fused == 0.7);
    CHECK(cfg.engine.temporal.floor == 0.05);
    // named windows override individually, the rest keep their defaults
    CHECK(cfg.engine.temporal.window_table.at(TemporalClass::explicit_date) == 5.0);
    CHECK(cfg.engine.temporal.window_table.at(TemporalClass::last_year) == 400.0);
    CHECK(cfg.engine.temporal.window_table.at(TemporalClass::day_relative) == 2.0);
    CHECK(cfg.embedder_mode == "remote");
    CHECK(cfg.embedder_seed == 7);
    CHECK(cfg.embedder_endpoint == "http://emb:9000");
    CHECK(cfg.embedder_timeout_ms == 750);
    CHECK(cfg.extractor_mode == "remote");
    CHECK(cfg.extractor_update_threshold == 0.9);
    CHECK(cfg.assistant_speaker == "Bot");
    CHECK(cfg.reranker_mode == "remote");
    CHECK(cfg.reranker_endpoint == "http://rr:9200");
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(ServiceConfig::from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(
        ServiceConfig::from_json(nlohmann::json::parse(
            R"({"temporal": {"windows": {"next_century": 1.0}}})")),
        ConfigError);
}

TEST_CASE("to_json round-trips through from_json") {
    ServiceConfig cfg;
    cfg.port = 8123;
    cfg.engine.fusion.k_rrf = 33;
    cfg.engine.temporal.window_table[TemporalClass::generic] = 45.0;
    cfg.embedder_seed = 99;
    CHECK(ServiceConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
}

TEST_CASE("load layers defaults, file and environment in that order") {
    TempFile file(R"({"listen": {"port": 9100}, "retrieve_context_n": 6})");

    SUBCASE("file alone") {
        ServiceConfig cfg = ServiceConfig::load(file.path.string());
        CHECK(cfg.port == 9100);
        CHECK(cfg.engine.retrieve_context_n == 6);
        CHECK(cfg.host == "127.0.0.1");  // untouched default
    }
    SUBCASE("environment beats the file") {
        EnvGuard env;
        env.set("MNEMO_PORT", "9200");
        env.set("MNEMO_HOST", "10.1.2.3");
        env.set("MNEMO_W_VECTOR", "0.8");
        env.set("MNEMO_W_BM25", "0.2");
        env.set("MNEMO_EMBEDDER_SEED", "1234");
        ServiceConfig cfg = ServiceConfig::load(file.path.string());
        CHECK(cfg.port == 9200);
        CHECK(cfg.host == "10.1.2.3");
        CHECK(cfg.engine.fusion.w_vector == 0.8);
        CHECK(cfg.engine.fusion.w_bm25 == 0.2);
        CHECK(cfg.embedder_seed == 1234);
        CHECK(cfg.engine.retrieve_context_n == 6);  // file value survives
    }
    SUBCASE("empty path means defaults plus environment") {
        EnvGuard env;
        env.set("MNEMO_RETRIEVE_CONTEXT_N", "3");
        ServiceConfig cfg = ServiceConfig::load("");
        CHECK(cfg.engine.retrieve_context_n == 3);
        CHECK(cfg.port == 7040);
    }
    SUBCASE("a malformed env value is a config error") {
        EnvGuard env;
        env.set("MNEMO_PORT", "not-a-number");
        CHECK_THROWS_AS(ServiceConfig::load(file.path.string()), ConfigError);
    }
    SUBCASE("env values still go through validation") {
        EnvGuard env;
        env.set("MNEMO_PORT", "70000");
        CHECK_THROWS_AS(ServiceConfig::load(file.path.string()), ConfigError);
    }
}

TEST_CASE("load rejects missing or unparsable files") {
    CHECK_THROWS_AS(ServiceConfig::load("/does/not/exist.json"), ConfigError);
    TempFile bad("{ this is not json");
    CHECK_THROWS_AS(ServiceConfig::load(bad.path.string()), ConfigError);
}

TEST_CASE("validate rejects out-of-range and inconsistent settings") {
    auto broken = [](auto mutate) {
        ServiceConfig cfg;
        mutate(cfg);
        return cfg;
    };

    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.port = -1; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.port = 65536; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.embedder_mode = "quantum"; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.embedder_mode = "remote"; }).validate(),
                    ConfigError);  // remote mode without an endpoint
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.extractor_mode = "remote"; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(
        broken([](ServiceConfig& c) { c.extractor_update_threshold = 1.0; }).validate(),
        ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.reranker_mode = "llm"; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.reranker_mode = "remote"; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.engine.fusion.k_rrf = 0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.engine.fusion.w_vector = 0.9; }).validate(),
                    ConfigError);  // weights no longer sum to 1
    CHECK_THROWS_AS(
        broken([](ServiceConfig& c) { c.engine.fusion.dedup_threshold = 0.0; }).validate(),
        ConfigError);
    CHECK_THROWS_AS(
        broken([](ServiceConfig& c) { c.engine.fusion.dedup_threshold = 1.5; }).validate(),
        ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.engine.temporal.floor = 0.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.engine.temporal.floor = 1.0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(
        broken([](ServiceConfig& c) { c.engine.temporal.w_temporal = 0.5; }).validate(),
        ConfigError);
    CHECK_THROWS_AS(
        broken([](ServiceConfig& c) {
            c.engine.temporal.window_table.erase(TemporalClass::generic);
        }).validate(),
        ConfigError);
    CHECK_THROWS_AS(
        broken([](ServiceConfig& c) {
            c.engine.temporal.window_table[TemporalClass::generic] = 0.0;
        }).validate(),
        ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.engine.retrieve_context_n = 0; }).validate(),
                    ConfigError);
    CHECK_THROWS_AS(broken([](ServiceConfig& c) { c.engine.snapshot_interval = -1; }).validate(),
                    ConfigError);

    // "none" reranker and port 0 (ephemeral) are both legitimate
    CHECK_NOTHROW(broken([](ServiceConfig& c) { c.reranker_mode = "none"; }).validate());
    CHECK_NOTHROW(broken([](ServiceConfig& c) { c.port = 0; }).validate());
}

TEST_CASE("factories honor the configured modes") {
    ServiceConfig cfg;
    auto emb = make_embedder(cfg);
    REQUIRE(emb);
    CHECK(emb->deterministic());

    auto ext = make_extractor(cfg, emb);
    CHECK(ext);

    CHECK(make_reranker(cfg) != nullptr);  // passthrough
    cfg.reranker_mode = "none";
    CHECK(make_reranker(cfg) == nullptr);

    auto engine = make_engine(cfg);
    REQUIRE(engine);
    CHECK(engine->config().fusion.k_rrf == cfg.engine.fusion.k_rrf);
}
