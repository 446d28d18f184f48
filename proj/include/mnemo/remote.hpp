#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace mnemo {

struct EndpointParts {
    std::string base;  // scheme://host:port
    std::string path;  // /path, "/" if absent
};

// Splits "http://host:port/path" into base and path. Throws RemoteError on
// anything that is not a plain http(s) URL.
EndpointParts split_endpoint(const std::string& component, const std::string& endpoint);

// POST a JSON body, expect 200 with a JSON body back. Throws RemoteError on
// connection failure, non-200 status or unparseable reply.
nlohmann::json post_json(const std::string& component, const std::string& endpoint,
                         const nlohmann::json& body, int timeout_ms);

// GET, expect 200. Returns false on any failure instead of throwing (used for
// reachability probes).
bool probe_ok(const std::string& endpoint, int timeout_ms);

}  // namespace mnemo
