// Durability: the journal file format, snapshot cut-over, replay semantics,
// and byte-identical engine state after a restart.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "mnemo/embedder.hpp"
#include "mnemo/engine.hpp"
#include "mnemo/extractor.hpp"
#include "mnemo/journal.hpp"
#include "mnemo/json_io.hpp"
#include "mnemo/time.hpp"

using namespace mnemo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mnemo-test-" + std::to_string(std::rand()) + "-" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

MemoryEngine open_engine(const fs::path& dir, int snapshot_interval = 0) {
    auto emb = make_reference_embedder(42);
    auto ext = std::make_shared<RuleBasedExtractor>(emb);
    EngineConfig cfg;
    cfg.snapshot_interval = snapshot_interval;
    return MemoryEngine(cfg, emb, ext, nullptr, std::make_unique<Journal>(dir));
}

std::string line(const std::string& ts, const std::string& text) {
    return "[" + ts + "] James: " + text;
}

// Canonical dump of everything observable about an owner, for equality checks.
nlohmann::json owner_fingerprint(MemoryEngine& eng, const std::string& owner) {
    nlohmann::json out;
    out["memories"] = nlohmann::json::array();
    for (const auto& m : eng.memories(owner)) out["memories"].push_back(to_json(m));
    out["messages"] = nlohmann::json::array();
    for (const auto& m : eng.messages(owner)) out["messages"].push_back(to_json(m));
    out["pending"] = eng.pending_count(owner);
    return out;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    std::string l;
    while (std::getline(in, l)) ++n;
    return n;
}

}  // namespace

TEST_CASE("append stamps increasing sequence numbers and flushes each line") {
    TempDir tmp;
    Journal j(tmp.path);
    CHECK(j.append({{"type", "a"}}) == 1);
    CHECK(j.append({{"type", "b"}}) == 2);
    CHECK(j.append({{"type", "c"}}) == 3);
    CHECK(j.entries_since_snapshot() == 3);

    // Bytes are on disk immediately, without closing the journal.
    fs::path log = tmp.path / "journal.log";
    REQUIRE(fs::exists(log));
    CHECK(line_count(log) == 3);

    std::ifstream in(log);
    std::string first;
    std::getline(in, first);
    auto parsed = nlohmann::json::parse(first);
    CHECK(parsed["seq"] == 1);
    CHECK(parsed["type"] == "a");
}

TEST_CASE("replay visits entries in order and respects the snapshot boundary") {
    TempDir tmp;
    {
        Journal j(tmp.path);
        j.append({{"n", 1}});
        j.append({{"n", 2}});
        j.write_snapshot({{"marker", "hello"}});
        CHECK(j.entries_since_snapshot() == 0);
        j.append({{"n", 3}});
        j.append({{"n", 4}});
    }
    Journal j2(tmp.path);
    nlohmann::json snap = j2.load_snapshot();
    REQUIRE_FALSE(snap.is_null());
    CHECK(snap["state"]["marker"] == "hello");
    CHECK(snap["last_seq"] == 2);

    std::vector<int> seen;
    j2.replay([&](const nlohmann::json& e) { seen.push_back(e["n"].get<int>()); });
    CHECK(seen == std::vector<int>{3, 4});
}

TEST_CASE("a snapshot truncates the log") {
    TempDir tmp;
    Journal j(tmp.path);
    j.append({{"n", 1}});
    j.append({{"n", 2}});
    CHECK(line_count(tmp.path / "journal.log") == 2);
    j.write_snapshot({{"ok", true}});
    CHECK(line_count(tmp.path / "journal.log") == 0);
    // and no temp file is left behind by the rename dance
    for (const auto& entry : fs::directory_iterator(tmp.path)) {
        auto name = entry.path().filename().string();
        CHECK((name == "journal.log" || name == "snapshot.json"));
    }
}

TEST_CASE("a partial trailing line ends replay instead of corrupting it") {
    TempDir tmp;
    {
        Journal j(tmp.path);
        j.append({{"n", 1}});
        j.append({{"n", 2}});
    }
    {
        // simulate a crash mid-append: half a JSON object, no newline
        std::ofstream out(tmp.path / "journal.log", std::ios::app);
        out << "{\"seq\": 3, \"n\": 3";
    }
    Journal j2(tmp.path);
    std::vector<int> seen;
    j2.replay([&](const nlohmann::json& e) { seen.push_back(e["n"].get<int>()); });
    CHECK(seen == std::vector<int>{1, 2});

    // the next append continues after the highest complete entry
    CHECK(j2.append({{"n", 99}}) > 2);
}

TEST_CASE("load_snapshot is empty when none was ever written") {
    TempDir tmp;
    Journal j(tmp.path);
    CHECK(j.load_snapshot().is_null());
}

TEST_CASE("an engine restarted on its journal reproduces its exact state") {
    TempDir tmp;
    nlohmann::json before;
    SearchResult res_before;
    SearchOptions opts;
    opts.k = 5;
    opts.now = parse_wall_clock("2024-06-01 12:00:00");

    {
        MemoryEngine eng = open_engine(tmp.path);
        eng.ingest_idempotent("james", "s1",
                              {line("2024-03-01 10:00:00", "I work as a Software Engineer."),
                               line("2024-03-01 10:01:00", "I live in Lisbon.")},
                              "batch-1");
        eng.process_pending("james");
        eng.ingest("james", "s2",
                   {line("2024-05-01 10:00:00", "I work as a Senior Engineer now.")});
        eng.process_pending("james");
        eng.ingest("james", "s3", {line("2024-05-02 10:00:00", "Unprocessed trailing note.")});

        before = owner_fingerprint(eng, "james");
        res_before = eng.search("james", "engineer", opts);
    }

    MemoryEngine eng2 = open_engine(tmp.path);
    CHECK(owner_fingerprint(eng2, "james") == before);

    // replayed embeddings are bit-identical, so scores and order are too
    SearchResult res_after = eng2.search("james", "engineer", opts);
    REQUIRE(res_after.hits.size() == res_before.hits.size());
    for (std::size_t i = 0; i < res_after.hits.size(); ++i) {
        CHECK(res_after.hits[i].memory_id == res_before.hits[i].memory_id);
        CHECK(res_after.hits[i].score_final == res_before.hits[i].score_final);
        CHECK(res_after.hits[i].score_fused == res_before.hits[i].score_fused);
    }

    // the idempotency ledger survived the restart
    auto [ids, replayed] = eng2.ingest_idempotent(
        "james", "s1",
        {line("2024-03-01 10:00:00", "I work as a Software Engineer."),
         line("2024-03-01 10:01:00", "I live in Lisbon.")},
        "batch-1");
    CHECK(replayed);
    CHECK(ids.size() == 2);

    // id allocation continues past everything replayed (no id reuse)
    auto fresh = eng2.ingest("james", "s4", {line("2024-05-03 10:00:00", "One more line.")});
    REQUIRE(fresh.size() == 1);
    for (const auto& j : before["messages"]) CHECK(j["id"] != fresh[0].id);
    for (const auto& j : before["memories"]) CHECK(j["id"] != fresh[0].id);
}

TEST_CASE("restart works from snapshot plus tail, and from snapshot alone") {
    TempDir tmp;
    nlohmann::json before;
    {
        // snapshot_interval 1 forces a snapshot after every journaled write
        MemoryEngine eng = open_engine(tmp.path, 1);
        eng.ingest("ana", "s1", {"[2024-05-01 09:00:00] Ana: My favorite color is teal."});
        eng.process_pending("ana");
        before = owner_fingerprint(eng, "ana");
    }
    REQUIRE(fs::exists(tmp.path / "snapshot.json"));
    CHECK(line_count(tmp.path / "journal.log") == 0);

    {
        // reopen with auto-snapshot off so the next write stays in the log
        MemoryEngine eng2 = open_engine(tmp.path, 0);
        CHECK(owner_fingerprint(eng2, "ana") == before);

        eng2.ingest("ana", "s2", {"[2024-05-02 09:00:00] Ana: I like rowing."});
        before = owner_fingerprint(eng2, "ana");
    }
    CHECK(line_count(tmp.path / "journal.log") == 1);
    MemoryEngine eng3 = open_engine(tmp.path, 0);
    CHECK(owner_fingerprint(eng3, "ana") == before);
}

TEST_CASE("snapshot_now cuts a snapshot on demand") {
    TempDir tmp;
    MemoryEngine eng = open_engine(tmp.path);
    eng.ingest("ana", "s1", {"[2024-05-01 09:00:00] Ana: I like rowing."});
    CHECK_FALSE(fs::exists(tmp.path / "snapshot.json"));
    eng.snapshot_now();
    CHECK(fs::exists(tmp.path / "snapshot.json"));
    CHECK(line_count(tmp.path / "journal.log") == 0);
}
