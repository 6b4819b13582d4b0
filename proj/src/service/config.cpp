#include "cspace/service/config.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "cspace/core/error.hpp"
#include "cspace/data/csv.hpp"

namespace cspace {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) fail(ErrorKind::Spec, "config " + key + " expects a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) fail(ErrorKind::Spec, "config " + key + " expects an integer, got '" + v + "'");
    return out;
}

std::vector<std::string> to_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

using Setter = std::function<void(ServiceConfig&, const std::string&, const std::string&)>;

template <class T>
Setter num(T ServiceConfig::*field) {
    return [field](ServiceConfig& c, const std::string& k, const std::string& v) {
        if constexpr (std::is_floating_point_v<T>) c.*field = to_double(k, v);
        else c.*field = static_cast<T>(to_int(k, v));
    };
}

template <class S, class T>
Setter nested(S ServiceConfig::*outer, T S::*field) {
    return [outer, field](ServiceConfig& c, const std::string& k, const std::string& v) {
        if constexpr (std::is_floating_point_v<T>) (c.*outer).*field = to_double(k, v);
        else (c.*outer).*field = static_cast<T>(to_int(k, v));
    };
}

template <class S, class T>
Setter layout_part(S LayoutParams::*outer, T S::*field) {
    return [outer, field](ServiceConfig& c, const std::string& k, const std::string& v) {
        if constexpr (std::is_floating_point_v<T>) (c.layout.*outer).*field = to_double(k, v);
        else (c.layout.*outer).*field = static_cast<T>(to_int(k, v));
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"host", [](ServiceConfig& c, const std::string&, const std::string& v) { c.host = v; }},
        {"port", num(&ServiceConfig::port)},
        {"dataset", [](ServiceConfig& c, const std::string&, const std::string& v) { c.dataset = v; }},
        {"missing_token", [](ServiceConfig& c, const std::string&, const std::string& v) { c.missing_token = v; }},
        {"seed",
         [](ServiceConfig& c, const std::string& k, const std::string& v) {
             const auto s = static_cast<std::uint64_t>(to_int(k, v));
             c.seed = s;
             c.booster.seed = s;
             c.tsne.seed = s;
             c.layout.seed = s;
         }},
        {"targets", [](ServiceConfig& c, const std::string&, const std::string& v) { c.targets = to_list(v); }},
        {"key_attributes",
         [](ServiceConfig& c, const std::string&, const std::string& v) { c.key_attributes = to_list(v); }},
        {"bins", num(&ServiceConfig::bins)},
        {"max_rows", num(&ServiceConfig::max_rows)},
        {"shap.max_features", num(&ServiceConfig::shap_features)},
        {"dbscan.eps", num(&ServiceConfig::dbscan_eps)},
        {"dbscan.min_pts", num(&ServiceConfig::dbscan_min_pts)},
        {"cami.max_col_missing", nested(&ServiceConfig::cami, &CamiParams::max_col_missing)},
        {"cami.max_row_missing", nested(&ServiceConfig::cami, &CamiParams::max_row_missing)},
        {"cami.top_columns", nested(&ServiceConfig::cami, &CamiParams::top_columns)},
        {"cami.top_rows", nested(&ServiceConfig::cami, &CamiParams::top_rows)},
        {"booster.stages", nested(&ServiceConfig::booster, &NgbParams::stages)},
        {"booster.depth", nested(&ServiceConfig::booster, &NgbParams::depth)},
        {"booster.learning_rate", nested(&ServiceConfig::booster, &NgbParams::learning_rate)},
        {"booster.sigma_floor", nested(&ServiceConfig::booster, &NgbParams::sigma_floor)},
        {"booster.seed", nested(&ServiceConfig::booster, &NgbParams::seed)},
        {"booster.min_leaf", nested(&ServiceConfig::booster, &NgbParams::min_leaf)},
        {"tsne.perplexity", nested(&ServiceConfig::tsne, &TsneParams::perplexity)},
        {"tsne.iters", nested(&ServiceConfig::tsne, &TsneParams::iters)},
        {"tsne.learning_rate", nested(&ServiceConfig::tsne, &TsneParams::learning_rate)},
        {"tsne.seed", nested(&ServiceConfig::tsne, &TsneParams::seed)},
        {"layout.sample_target", nested(&ServiceConfig::layout, &LayoutParams::sample_target)},
        {"layout.bandwidth", nested(&ServiceConfig::layout, &LayoutParams::bandwidth)},
        {"layout.seed", nested(&ServiceConfig::layout, &LayoutParams::seed)},
        {"layout.eps", nested(&ServiceConfig::layout, &LayoutParams::eps)},
        {"layout.min_pts", nested(&ServiceConfig::layout, &LayoutParams::min_pts)},
        {"layout.padding", nested(&ServiceConfig::layout, &LayoutParams::padding)},
        {"layout.buffer_radius", nested(&ServiceConfig::layout, &LayoutParams::buffer_radius)},
        {"layout.max_glyph_radius", nested(&ServiceConfig::layout, &LayoutParams::max_glyph_radius)},
        {"layout.glyph_radius", nested(&ServiceConfig::layout, &LayoutParams::glyph_radius)},
        {"partition.grid", layout_part(&LayoutParams::partition, &PartitionParams::grid)},
        {"partition.split_area", layout_part(&LayoutParams::partition, &PartitionParams::split_area)},
        {"partition.min_area", layout_part(&LayoutParams::partition, &PartitionParams::min_area)},
        {"cartogram.grid_res", layout_part(&LayoutParams::cartogram, &CartogramParams::grid_res)},
        {"cartogram.max_steps", layout_part(&LayoutParams::cartogram, &CartogramParams::max_steps)},
        {"cartogram.area_tol", layout_part(&LayoutParams::cartogram, &CartogramParams::area_tol)},
        {"force.k_b", layout_part(&LayoutParams::force, &ForceParams::k_b)},
        {"force.k_o", layout_part(&LayoutParams::force, &ForceParams::k_o)},
        {"force.link_strength", layout_part(&LayoutParams::force, &ForceParams::link_strength)},
        {"force.charge_strength", layout_part(&LayoutParams::force, &ForceParams::charge_strength)},
        {"force.charge_range", layout_part(&LayoutParams::force, &ForceParams::charge_range)},
        {"force.velocity_decay", layout_part(&LayoutParams::force, &ForceParams::velocity_decay)},
        {"force.max_iters", layout_part(&LayoutParams::force, &ForceParams::max_iters)},
        {"force.tol", layout_part(&LayoutParams::force, &ForceParams::tol)},
        {"force.projection_rounds", layout_part(&LayoutParams::force, &ForceParams::projection_rounds)},
    };
    return table;
}

}  // namespace

void ServiceConfig::set(const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) fail(ErrorKind::Spec, "unknown config key '" + key + "'");
    it->second(*this, key, trim(value));
}

std::vector<std::string> ServiceConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
}

std::pair<std::string, std::string> split_assignment(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Spec, "expected key=value, got '" + std::string(text) + "'");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

ServiceConfig parse_config(std::string_view text, ServiceConfig base) {
    std::stringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        try {
            const auto [k, v] = split_assignment(line);
            base.set(k, v);
        } catch (const Error& e) {
            fail(ErrorKind::Spec, "config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ServiceConfig load_config(const std::string& path, ServiceConfig base) {
    return parse_config(read_file(path), std::move(base));
}

std::string config_path(const std::string& fallback) {
    const char* env = std::getenv("CSPACE_CONFIG");
    return env && *env ? std::string(env) : fallback;
}

void apply_overrides(ServiceConfig& config, const nlohmann::json& overrides) {
    if (!overrides.is_object()) fail(ErrorKind::Spec, "config overrides must be an object");
    for (const auto& [k, v] : overrides.items()) {
        std::string text;
        if (v.is_string()) {
            text = v.get<std::string>();
        } else if (v.is_number_integer()) {
            text = std::to_string(v.get<long long>());
        } else if (v.is_number()) {
            text = format_double(v.get<double>());
        } else if (v.is_boolean()) {
            text = v.get<bool>() ? "1" : "0";
        } else if (v.is_array()) {
            for (const auto& item : v) {
                if (!item.is_string()) fail(ErrorKind::Spec, "config " + k + " list items must be strings");
                if (!text.empty()) text += ',';
                text += item.get<std::string>();
            }
        } else {
            fail(ErrorKind::Spec, "config " + k + " has an unsupported value type");
        }
        config.set(k, text);
    }
}

}  // namespace cspace
