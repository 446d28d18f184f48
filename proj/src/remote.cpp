#include "mnemo/remote.hpp"

#include <httplib.h>

#include "mnemo/errors.hpp"

namespace mnemo {

EndpointParts split_endpoint(const std::string& component, const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw RemoteError(component, "endpoint must start with http:// — got '" + endpoint + "'");
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

nlohmann::json post_json(const std::string& component, const std::string& endpoint,
                         const nlohmann::json& body, int timeout_ms) {
    auto parts = split_endpoint(component, endpoint);
    httplib::Client cli(parts.base);
    cli.set_connection_timeout(0, timeout_ms * 1000);
    cli.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    cli.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    auto res = cli.Post(parts.path, body.dump(), "application/json");
    if (!res) throw RemoteError(component, "request to " + endpoint + " failed: " +
                                               httplib::to_string(res.error()));
    if (res->status != 200)
        throw RemoteError(component,
                          "unexpected status " + std::to_string(res->status) + " from " + endpoint);
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw RemoteError(component, "reply is not valid JSON");
    return parsed;
}

bool probe_ok(const std::string& endpoint, int timeout_ms) {
    try {
        auto parts = split_endpoint("probe", endpoint);
        httplib::Client cli(parts.base);
        cli.set_connection_timeout(0, timeout_ms * 1000);
        cli.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        auto res = cli.Get(parts.path);
        return res && res->status == 200;
    } catch (...) {
        return false;
    }
}

}  // namespace mnemo
