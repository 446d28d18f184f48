#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "mnemo/engine.hpp"

namespace mnemo {

// Full deployment configuration. Sources, later wins:
//   defaults < config file < MNEMO_* environment variables.
// Every scalar has a 1:1 env override; the temporal window table is
// file-only.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 7040;
    std::string data_dir;  // empty: no persistence

    EngineConfig engine;

    std::string embedder_mode = "reference";  // reference | remote
    std::uint64_t embedder_seed = 42;
    std::string embedder_endpoint;
    int embedder_timeout_ms = 2000;

    std::string extractor_mode = "rule";  // rule | remote
    std::string extractor_endpoint;
    int extractor_timeout_ms = 5000;
    double extractor_update_threshold = 0.95;
    std::string assistant_speaker = "Assistant";

    std::string reranker_mode = "passthrough";  // passthrough | remote | none
    std::string reranker_endpoint;
    int reranker_timeout_ms = 2000;

    static ServiceConfig from_json(const nlohmann::json& j);
    static ServiceConfig load(const std::string& path);  // parse file + apply_env
    void apply_env();
    void validate() const;  // throws ConfigError
    nlohmann::json to_json() const;
};

std::shared_ptr<Embedder> make_embedder(const ServiceConfig& cfg);
std::shared_ptr<Extractor> make_extractor(const ServiceConfig& cfg,
                                          std::shared_ptr<Embedder> embedder);
std::shared_ptr<Reranker> make_reranker(const ServiceConfig& cfg);

// Wires everything together (journal included when data_dir is set).
std::unique_ptr<MemoryEngine> make_engine(const ServiceConfig& cfg);

}  // namespace mnemo
