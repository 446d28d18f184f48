#include "mnemo/service_config.hpp"

#include <cstdlib>
#include <fstream>

#include "mnemo/errors.hpp"

namespace mnemo {

namespace {

TemporalClass temporal_class_from_string(const std::string& s) {
    for (int i = 0; i < 6; ++i) {
        auto c = static_cast<TemporalClass>(i);
        if (s == to_string(c)) return c;
    }
    throw ConfigError("unknown temporal window class: " + s);
}

const char* env(const char* name) {
    return std::getenv(name);
}

void env_str(const char* name, std::string& out) {
    if (const char* v = env(name)) out = v;
}

void env_int(const char* name, int& out) {
    if (const char* v = env(name)) {
        try {
            out = std::stoi(v);
        } catch (...) {
            throw ConfigError(std::string(name) + " must be an integer, got '" + v + "'");
        }
    }
}

void env_u64(const char* name, std::uint64_t& out) {
    if (const char* v = env(name)) {
        try {
            out = std::stoull(v);
        } catch (...) {
            throw ConfigError(std::string(name) + " must be an unsigned integer, got '" + v + "'");
        }
    }
}

void env_double(const char* name, double& out) {
    if (const char* v = env(name)) {
        try {
            out = std::stod(v);
        } catch (...) {
            throw ConfigError(std::string(name) + " must be a number, got '" + v + "'");
        }
    }
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
    ServiceConfig cfg;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    if (j.contains("listen")) {
        const auto& l = j["listen"];
        if (l.contains("host")) cfg.host = l["host"].get<std::string>();
        if (l.contains("port")) cfg.port = l["port"].get<int>();
    }
    if (j.contains("data_dir")) cfg.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("snapshot_interval"))
        cfg.engine.snapshot_interval = j["snapshot_interval"].get<int>();
    if (j.contains("retrieve_context_n"))
        cfg.engine.retrieve_context_n = j["retrieve_context_n"].get<int>();

    if (j.contains("fusion")) {
        const auto& f = j["fusion"];
        auto& fc = cfg.engine.fusion;
        if (f.contains("k_rrf")) fc.k_rrf = f["k_rrf"].get<int>();
        if (f.contains("w_vector")) fc.w_vector = f["w_vector"].get<double>();
        if (f.contains("w_bm25")) fc.w_bm25 = f["w_bm25"].get<double>();
        if (f.contains("candidate_depth")) fc.candidate_depth = f["candidate_depth"].get<int>();
        if (f.contains("shortlist_size")) fc.shortlist_size = f["shortlist_size"].get<int>();
        if (f.contains("rerank_top_n")) fc.rerank_top_n = f["rerank_top_n"].get<int>();
        if (f.contains("dedup_threshold")) fc.dedup_threshold = f["dedup_threshold"].get<double>();
    }
    if (j.contains("temporal")) {
        const auto& t = j["temporal"];
        auto& tc = cfg.engine.temporal;
        if (t.contains("w_fused")) tc.w_fused = t["w_fused"].get<double>();
        if (t.contains("w_temporal")) tc.w_temporal = t["w_temporal"].get<double>();
        if (t.contains("floor")) tc.floor = t["floor"].get<double>();
        if (t.contains("windows"))
            for (const auto& [name, days] : t["windows"].items())
                tc.window_table[temporal_class_from_string(name)] = days.get<double>();
    }
    if (j.contains("embedder")) {
        const auto& e = j["embedder"];
        if (e.contains("mode")) cfg.embedder_mode = e["mode"].get<std::string>();
        if (e.contains("seed")) cfg.embedder_seed = e["seed"].get<std::uint64_t>();
        if (e.contains("endpoint")) cfg.embedder_endpoint = e["endpoint"].get<std::string>();
        if (e.contains("timeout_ms")) cfg.embedder_timeout_ms = e["timeout_ms"].get<int>();
    }
    if (j.contains("extractor")) {
        const auto& e = j["extractor"];
        if (e.contains("mode")) cfg.extractor_mode = e["mode"].get<std::string>();
        if (e.contains("endpoint")) cfg.extractor_endpoint = e["endpoint"].get<std::string>();
        if (e.contains("timeout_ms")) cfg.extractor_timeout_ms = e["timeout_ms"].get<int>();
        if (e.contains("update_threshold"))
            cfg.extractor_update_threshold = e["update_threshold"].get<double>();
        if (e.contains("assistant_speaker"))
            cfg.assistant_speaker = e["assistant_speaker"].get<std::string>();
    }
    if (j.contains("reranker")) {
        const auto& r = j["reranker"];
        if (r.contains("mode")) cfg.reranker_mode = r["mode"].get<std::string>();
        if (r.contains("endpoint")) cfg.reranker_endpoint = r["endpoint"].get<std::string>();
        if (r.contains("timeout_ms")) cfg.reranker_timeout_ms = r["timeout_ms"].get<int>();
    }
    return cfg;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
    ServiceConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
        cfg = from_json(j);
    }
    cfg.apply_env();
    cfg.validate();
    return cfg;
}

void ServiceConfig::apply_env() {
    env_str("MNEMO_HOST", host);
    env_int("MNEMO_PORT", port);
    env_str("MNEMO_DATA_DIR", data_dir);
    env_int("MNEMO_SNAPSHOT_INTERVAL", engine.snapshot_interval);
    env_int("MNEMO_RETRIEVE_CONTEXT_N", engine.retrieve_context_n);

    env_int("MNEMO_K_RRF", engine.fusion.k_rrf);
    env_double("MNEMO_W_VECTOR", engine.fusion.w_vector);
    env_double("MNEMO_W_BM25", engine.fusion.w_bm25);
    env_int("MNEMO_CANDIDATE_DEPTH", engine.fusion.candidate_depth);
    env_int("MNEMO_SHORTLIST_SIZE", engine.fusion.shortlist_size);
    env_int("MNEMO_RERANK_TOP_N", engine.fusion.rerank_top_n);
    env_double("MNEMO_DEDUP_THRESHOLD", engine.fusion.dedup_threshold);

    env_double("MNEMO_W_FUSED", engine.temporal.w_fused);
    env_double("MNEMO_W_TEMPORAL", engine.temporal.w_temporal);
    env_double("MNEMO_TEMPORAL_FLOOR", engine.temporal.floor);

    env_str("MNEMO_EMBEDDER_MODE", embedder_mode);
    env_u64("MNEMO_EMBEDDER_SEED", embedder_seed);
    env_str("MNEMO_EMBEDDER_ENDPOINT", embedder_endpoint);
    env_int("MNEMO_EMBEDDER_TIMEOUT_MS", embedder_timeout_ms);

    env_str("MNEMO_EXTRACTOR_MODE", extractor_mode);
    env_str("MNEMO_EXTRACTOR_ENDPOINT", extractor_endpoint);
    env_int("MNEMO_EXTRACTOR_TIMEOUT_MS", extractor_timeout_ms);
    env_double("MNEMO_EXTRACTOR_UPDATE_THRESHOLD", extractor_update_threshold);
    env_str("MNEMO_ASSISTANT_SPEAKER", assistant_speaker);

    env_str("MNEMO_RERANKER_MODE", reranker_mode);
    env_str("MNEMO_RERANKER_ENDPOINT", reranker_endpoint);
    env_int("MNEMO_RERANKER_TIMEOUT_MS", reranker_timeout_ms);
}

void ServiceConfig::validate() const {
    engine.validate();
    if (port < 0 || port > 65535) throw ConfigError("port must be in [0, 65535]");
    if (embedder_mode != "reference" && embedder_mode != "remote")
        throw ConfigError("embedder.mode must be reference or remote");
    if (embedder_mode == "remote" && embedder_endpoint.empty())
        throw ConfigError("embedder.endpoint is required in remote mode");
    if (extractor_mode != "rule" && extractor_mode != "remote")
        throw ConfigError("extractor.mode must be rule or remote");
    if (extractor_mode == "remote" && extractor_endpoint.empty())
        throw ConfigError("extractor.endpoint is required in remote mode");
    if (extractor_update_threshold <= 0.0 || extractor_update_threshold >= 1.0)
        throw ConfigError("extractor.update_threshold must be in (0, 1)");
    if (reranker_mode != "passthrough" && reranker_mode != "remote" && reranker_mode != "none")
        throw ConfigError("reranker.mode must be passthrough, remote or none");
    if (reranker_mode == "remote" && reranker_endpoint.empty())
        throw ConfigError("reranker.endpoint is required in remote mode");
}

nlohmann::json ServiceConfig::to_json() const {
    nlohmann::json windows = nlohmann::json::object();
    for (const auto& [cls, days] : engine.temporal.window_table) windows[to_string(cls)] = days;
    return {
        {"listen", {{"host", host}, {"port", port}}},
        {"data_dir", data_dir},
        {"snapshot_interval", engine.snapshot_interval},
        {"retrieve_context_n", engine.retrieve_context_n},
        {"fusion",
         {{"k_rrf", engine.fusion.k_rrf},
          {"w_vector", engine.fusion.w_vector},
          {"w_bm25", engine.fusion.w_bm25},
          {"candidate_depth", engine.fusion.candidate_depth},
          {"shortlist_size", engine.fusion.shortlist_size},
          {"rerank_top_n", engine.fusion.rerank_top_n},
          {"dedup_threshold", engine.fusion.dedup_threshold}}},
        {"temporal",
         {{"w_fused", engine.temporal.w_fused},
          {"w_temporal", engine.temporal.w_temporal},
          {"floor", engine.temporal.floor},
          {"windows", windows}}},
        {"embedder",
         {{"mode", embedder_mode},
          {"seed", embedder_seed},
          {"endpoint", embedder_endpoint},
          {"timeout_ms", embedder_timeout_ms}}},
        {"extractor",
         {{"mode", extractor_mode},
          {"endpoint", extractor_endpoint},
          {"timeout_ms", extractor_timeout_ms},
          {"update_threshold", extractor_update_threshold},
          {"assistant_speaker", assistant_speaker}}},
        {"reranker",
         {{"mode", reranker_mode},
          {"endpoint", reranker_endpoint},
          {"timeout_ms", reranker_timeout_ms}}},
    };
}

std::shared_ptr<Embedder> make_embedder(const ServiceConfig& cfg) {
    if (cfg.embedder_mode == "remote")
        return std::make_shared<RemoteEmbedder>(cfg.embedder_endpoint, cfg.embedder_timeout_ms);
    return std::make_shared<ReferenceEmbedder>(cfg.embedder_seed);
}

std::shared_ptr<Extractor> make_extractor(const ServiceConfig& cfg,
                                          std::shared_ptr<Embedder> embedder) {
    if (cfg.extractor_mode == "remote")
        return std::make_shared<RemoteExtractor>(cfg.extractor_endpoint, cfg.extractor_timeout_ms);
    return std::make_shared<RuleBasedExtractor>(std::move(embedder),
                                                cfg.extractor_update_threshold,
                                                cfg.assistant_speaker);
}

std::shared_ptr<Reranker> make_reranker(const ServiceConfig& cfg) {
    if (cfg.reranker_mode == "remote")
        return std::make_shared<RemoteReranker>(cfg.reranker_endpoint, cfg.reranker_timeout_ms);
    if (cfg.reranker_mode == "none") return nullptr;
    return std::make_shared<PassthroughReranker>();
}

std::unique_ptr<MemoryEngine> make_engine(const ServiceConfig& cfg) {
    cfg.validate();
    auto embedder = make_embedder(cfg);
    auto extractor = make_extractor(cfg, embedder);
    auto reranker = make_reranker(cfg);
    std::unique_ptr<Journal> journal;
    if (!cfg.data_dir.empty()) journal = std::make_unique<Journal>(cfg.data_dir);
    return std::make_unique<MemoryEngine>(cfg.engine, embedder, extractor, reranker,
                                          std::move(journal));
}

}  // namespace mnemo
