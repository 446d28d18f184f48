#include "mnemo/journal.hpp"

#include "mnemo/errors.hpp"

namespace mnemo {

namespace fs = std::filesystem;

Journal::Journal(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    log_path_ = dir_ / "journal.log";
    snapshot_path_ = dir_ / "snapshot.json";
}

nlohmann::json Journal::load_snapshot() {
    if (!fs::exists(snapshot_path_)) return nlohmann::json();
    std::ifstream in(snapshot_path_);
    auto snap = nlohmann::json::parse(in, nullptr, false);
    if (snap.is_discarded() || !snap.is_object())
        throw Error("corrupt snapshot: " + snapshot_path_.string());
    snapshot_seq_ = snap.value("last_seq", std::uint64_t(0));
    next_seq_ = snapshot_seq_ + 1;
    return snap;
}

void Journal::replay(const std::function<void(const nlohmann::json&)>& apply) {
    if (fs::exists(log_path_)) {
        std::ifstream in(log_path_);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto entry = nlohmann::json::parse(line, nullptr, false);
            if (entry.is_discarded() || !entry.is_object() || !entry.contains("seq"))
                break;  // partial trailing write; everything before it is intact
            std::uint64_t seq = entry["seq"].get<std::uint64_t>();
            if (seq <= snapshot_seq_) continue;
            apply(entry);
            next_seq_ = seq + 1;
            ++entries_since_snapshot_;
        }
    }
    log_.open(log_path_, std::ios::app);
    if (!log_) throw Error("cannot open journal log: " + log_path_.string());
}

std::uint64_t Journal::append(nlohmann::json body) {
    std::lock_guard lk(mtx_);
    if (!log_.is_open()) {
        log_.open(log_path_, std::ios::app);
        if (!log_) throw Error("cannot open journal log: " + log_path_.string());
    }
    std::uint64_t seq = next_seq_++;
    body["seq"] = seq;
    log_ << body.dump() << '\n';
    log_.flush();
    if (!log_) throw Error("journal append failed: " + log_path_.string());
    ++entries_since_snapshot_;
    return seq;
}

void Journal::write_snapshot(const nlohmann::json& state) {
    std::lock_guard lk(mtx_);
    nlohmann::json snap{{"last_seq", next_seq_ - 1}, {"state", state}};
    fs::path tmp = snapshot_path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << snap.dump();
        out.flush();
        if (!out) throw Error("snapshot write failed: " + tmp.string());
    }
    fs::rename(tmp, snapshot_path_);
    snapshot_seq_ = next_seq_ - 1;
    // Entries at or below snapshot_seq_ are now redundant; start a fresh log.
    log_.close();
    log_.open(log_path_, std::ios::trunc);
    if (!log_) throw Error("cannot truncate journal log: " + log_path_.string());
    entries_since_snapshot_ = 0;
}

}  // namespace mnemo
