#include "cspace/service/service.hpp"

#include <regex>
#include <sstream>

#include "cspace/data/csv.hpp"

namespace cspace {

using nlohmann::json;

namespace {

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
    return {status, {{"error", code}, {"message", message}}};
}

int status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse:
        case ErrorKind::Schema:
        case ErrorKind::Spec:
        case ErrorKind::Key:
        case ErrorKind::Input:
        case ErrorKind::Shape:
        case ErrorKind::EmptyInput:
        case ErrorKind::TooManyKeyAttrs: return 400;
        default: return 500;
    }
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        throw HttpError(400, "bad_json", std::string("request body is not JSON: ") + e.what());
    }
}

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int int_param(const HttpRequest& r, const std::string& name, int fallback) {
    const auto it = r.query.find(name);
    if (it == r.query.end()) return fallback;
    try {
        std::size_t used = 0;
        const int v = std::stoi(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw HttpError(400, "bad_request", "query parameter " + name + " must be an integer");
}

}  // namespace

std::shared_ptr<Session> Service::session(const std::string& id) const {
    std::lock_guard lk(mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t Service::session_count() const {
    std::lock_guard lk(mutex_);
    return sessions_.size();
}

HttpResponse Service::handle(const HttpRequest& request) {
    try {
        return route(request);
    } catch (const HttpError& e) {
        return error_response(e.status(), e.code(), e.what());
    } catch (const PipelineError& e) {
        auto r = error_response(422, "pipeline", e.what());
        r.body["stage"] = e.stage();
        r.body["kind"] = std::string(to_string(e.kind()));
        return r;
    } catch (const Error& e) {
        return error_response(status_of(e.kind()), std::string(to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

HttpResponse Service::create_session(const json& body) {
    if (!body.is_object()) throw HttpError(400, "bad_request", "body must be an object");
    ServiceConfig config = defaults_;
    if (body.contains("config")) apply_overrides(config, body["config"]);

    DataTable raw;
    try {
        std::string text;
        if (body.contains("csv")) {
            if (!body["csv"].is_string()) fail(ErrorKind::Schema, "csv must be a string");
            text = body["csv"].get<std::string>();
        } else {
            std::string path = config.dataset;
            if (body.contains("dataset")) {
                if (!body["dataset"].is_string()) fail(ErrorKind::Schema, "dataset must be a string");
                path = body["dataset"].get<std::string>();
            }
            if (path.empty()) throw HttpError(400, "bad_request", "no dataset given");
            text = read_file(path);
        }
        raw = load_csv(text, CsvOptions{config.missing_token});
    } catch (const Error& e) {
        throw PipelineError("load", e.kind(), e.what());
    }

    std::string id;
    {
        std::lock_guard lk(mutex_);
        id = "s" + std::to_string(next_id_++);
    }
    auto s = std::make_shared<Session>(id, raw, std::move(config));
    {
        std::lock_guard lk(mutex_);
        sessions_[id] = s;
    }
    return {201, s->summary()};
}

HttpResponse Service::route(const HttpRequest& r) {
    static const std::regex session_path("^/sessions/([^/]+)(/([a-z-]+))?/?$");
    if (r.path == "/healthz") {
        if (r.method != "GET") throw HttpError(405, "method_not_allowed", "use GET");
        return {200, {{"status", "ok"}, {"sessions", session_count()}}};
    }
    if (r.path == "/sessions" || r.path == "/sessions/") {
        if (r.method != "POST") throw HttpError(405, "method_not_allowed", "use POST");
        return create_session(parse_body(r.body));
    }
    std::smatch m;
    if (!std::regex_match(r.path, m, session_path)) throw HttpError(404, "not_found", "no route for " + r.path);
    const auto s = session(m[1].str());
    if (!s) throw HttpError(404, "unknown_session", "no session " + m[1].str());
    const std::string action = m[3].str();

    auto expect = [&](const char* method) {
        if (r.method != method) throw HttpError(405, "method_not_allowed", std::string("use ") + method);
    };
    if (action.empty()) {
        expect("GET");
        return {200, s->summary()};
    }
    if (action == "filter") {
        expect("POST");
        return {200, s->post_filter(parse_body(r.body))};
    }
    if (action == "key-attributes") {
        expect("POST");
        return {200, s->set_key_attributes(parse_body(r.body))};
    }
    if (action == "history") {
        expect("GET");
        std::optional<int> node;
        if (r.query.count("node")) node = int_param(r, "node", 0);
        return {200, s->history(node)};
    }
    if (action == "distribution") {
        expect("GET");
        return {200, s->distribution(int_param(r, "bins", defaults_.bins))};
    }
    if (action == "discovery") {
        expect("GET");
        return {200, s->discovery()};
    }
    if (action == "comparison") {
        expect("GET");
        const auto it = r.query.find("ids");
        return {200, s->comparison(it == r.query.end() ? std::vector<std::string>{} : split_ids(it->second))};
    }
    throw HttpError(404, "not_found", "no route for " + r.path);
}

}  // namespace cspace
