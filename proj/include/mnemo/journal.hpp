#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

namespace mnemo {

// Append-only effect journal plus periodic snapshot.
//
// Layout inside the data directory:
//   snapshot.json  — {"last_seq": N, "next_id": N, "state": {...}}
//   journal.log    — one JSON object per line, each stamped with "seq"
//
// Appends are flushed so the bytes survive a process kill. Snapshots are
// written to a temp file and renamed into place, then the log is truncated;
// a crash between rename and truncate only leaves entries that replay as
// no-ops (seq <= snapshot last_seq is skipped).
class Journal {
public:
    explicit Journal(std::filesystem::path dir);

    // nullptr-like empty json when no snapshot exists.
    nlohmann::json load_snapshot();

    // Invokes apply for every decodable entry with seq > snapshot last_seq, in
    // order. A trailing partial line (crash mid-append of an unacknowledged
    // request) ends replay.
    void replay(const std::function<void(const nlohmann::json&)>& apply);

    // Stamps "seq", appends one line, flushes. Returns the sequence number.
    std::uint64_t append(nlohmann::json body);

    void write_snapshot(const nlohmann::json& state);

    std::uint64_t entries_since_snapshot() const { return entries_since_snapshot_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::filesystem::path log_path_;
    std::filesystem::path snapshot_path_;
    std::ofstream log_;
    std::uint64_t next_seq_ = 1;
    std::uint64_t snapshot_seq_ = 0;
    std::uint64_t entries_since_snapshot_ = 0;
    std::mutex mtx_;
};

}  // namespace mnemo
