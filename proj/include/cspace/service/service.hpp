#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "cspace/service/config.hpp"
#include "cspace/service/session.hpp"

namespace cspace {

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    nlohmann::json body;
};

/// Transport-independent request handling for every endpoint:
///
///   GET  /healthz
///   POST /sessions                       {"dataset": path} or {"csv": text}, optional "config"
///   GET  /sessions/{id}
///   POST /sessions/{id}/filter           {"filter": FilterSpec, "parent": optional}
///   POST /sessions/{id}/key-attributes   {"attributes": [...]}
///   GET  /sessions/{id}/history          ?node= replays that node
///   GET  /sessions/{id}/distribution     ?bins=
///   GET  /sessions/{id}/discovery
///   GET  /sessions/{id}/comparison       ?ids=a,b,c
///
/// Errors come back as {"error", "message"} (plus "stage" for 422).
class Service {
public:
    explicit Service(ServiceConfig defaults = {}) : defaults_(std::move(defaults)) {}

    HttpResponse handle(const HttpRequest& request);
    std::shared_ptr<Session> session(const std::string& id) const;  // null when absent
    std::size_t session_count() const;

private:
    HttpResponse route(const HttpRequest& request);
    HttpResponse create_session(const nlohmann::json& body);

    ServiceConfig defaults_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    int next_id_ = 1;
};

/// Serves `service` over HTTP until the process stops. False when the
/// address cannot be bound.
bool serve_http(Service& service, const std::string& host, int port);

}  // namespace cspace
