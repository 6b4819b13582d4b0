#include "cspace/service/schema.hpp"

#include "cspace/core/error.hpp"

namespace cspace {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
    if (t == "number") return v.is_number();
    fail(ErrorKind::Schema, "unsupported schema type " + t);
}

class Validator {
public:
    explicit Validator(const json& root) : root_(root) {}

    void check(const json& s, const json& v, const std::string& at) {
        if (s.contains("$ref")) {
            const auto ref = s["$ref"].get<std::string>();
            const std::string prefix = "#/definitions/";
            if (ref.rfind(prefix, 0) != 0) fail(ErrorKind::Schema, "unsupported $ref " + ref);
            check(root_.at("definitions").at(ref.substr(prefix.size())), v, at);
            return;
        }
        if (s.contains("type")) {
            bool ok = false;
            if (s["type"].is_array()) {
                for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
            } else {
                ok = has_type(v, s["type"].get<std::string>());
            }
            if (!ok) {
                err(at, "expected type " + s["type"].dump() + ", got " + v.type_name());
                return;
            }
        }
        if (s.contains("enum")) {
            bool found = false;
            for (const auto& e : s["enum"]) found = found || e == v;
            if (!found) err(at, "value " + v.dump() + " not in enum");
        }
        if (v.is_number()) {
            const double x = v.get<double>();
            if (s.contains("minimum") && x < s["minimum"].get<double>()) err(at, "below minimum");
            if (s.contains("maximum") && x > s["maximum"].get<double>()) err(at, "above maximum");
        }
        if (v.is_array()) {
            if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) err(at, "too few items");
            if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) err(at, "too many items");
            if (s.contains("items")) {
                for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], at + "/" + std::to_string(i));
            }
        }
        if (v.is_object()) {
            if (s.contains("required")) {
                for (const auto& r : s["required"]) {
                    if (!v.contains(r.get<std::string>())) err(at, "missing property " + r.get<std::string>());
                }
            }
            const json props = s.value("properties", json::object());
            for (const auto& [k, item] : v.items()) {
                if (props.contains(k)) {
                    check(props[k], item, at + "/" + k);
                } else if (s.contains("additionalProperties")) {
                    const auto& ap = s["additionalProperties"];
                    if (ap.is_boolean()) {
                        if (!ap.get<bool>()) err(at, "unexpected property " + k);
                    } else {
                        check(ap, item, at + "/" + k);
                    }
                }
            }
        }
    }

    std::vector<std::string> errors;

private:
    void err(const std::string& at, const std::string& msg) { errors.push_back((at.empty() ? "/" : at) + ": " + msg); }

    const json& root_;
};

}  // namespace

std::vector<std::string> validate_schema(const json& schema, const json& doc) {
    Validator v(schema);
    v.check(schema, doc, "");
    return v.errors;
}

}  // namespace cspace
