#include "cspace/service/http.hpp"

namespace cspace {

void mount(httplib::Server& server, Service& service) {
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        HttpRequest r{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        const auto out = service.handle(r);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
}

bool serve_http(Service& service, const std::string& host, int port) {
    httplib::Server server;
    mount(server, service);
    return server.listen(host, port);
}

}  // namespace cspace
