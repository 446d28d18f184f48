#pragma once

#include <memory>

#include "mnemo/engine.hpp"
#include "mnemo/service_config.hpp"

namespace httplib {
class Server;
}

namespace mnemo {

// HTTP front end.
//
//   POST /v1/{owner}/messages                (Idempotency-Key header honored)
//   POST /v1/{owner}/process
//   POST /v1/{owner}/search
//   GET  /v1/{owner}/memories/{id}/history
//   GET  /healthz
//
// Errors are {"error": {"code", "message"}} with 400 for bad input, 404 for
// unknown ids, 502 when a remote helper fails, 500 otherwise.
class MemoryService {
public:
    explicit MemoryService(ServiceConfig cfg);
    MemoryService(ServiceConfig cfg, std::unique_ptr<MemoryEngine> engine);
    ~MemoryService();

    // Blocks until stop(). Returns false when binding fails. With port 0 an
    // ephemeral port is picked; port() reports it once listening.
    bool listen();
    void stop();
    bool wait_until_ready(int timeout_ms = 5000) const;
    int port() const { return port_; }

    MemoryEngine& engine() { return *engine_; }
    const ServiceConfig& config() const { return cfg_; }

private:
    void install_routes();

    ServiceConfig cfg_;
    std::unique_ptr<MemoryEngine> engine_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = 0;
};

}  // namespace mnemo
