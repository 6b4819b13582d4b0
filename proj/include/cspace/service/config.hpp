#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cspace/embed/tsne.hpp"
#include "cspace/impute/cami.hpp"
#include "cspace/layout/scene.hpp"
#include "cspace/predict/ngboost.hpp"

namespace cspace {

/// Everything a server or session can be tuned with. Keys use the
/// `module.field` form, e.g. `cami.top_rows = 5`.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string dataset;
    std::string missing_token;
    std::uint64_t seed = 0;
    std::vector<std::string> targets;
    std::vector<std::string> key_attributes;
    int bins = 10;
    std::size_t max_rows = 2000;
    int shap_features = 8;
    double dbscan_eps = 0.0;  // 0 picks the k-distance elbow
    int dbscan_min_pts = 4;
    CamiParams cami;
    NgbParams booster;
    TsneParams tsne;
    LayoutParams layout;

    /// Spec error on an unknown key or a malformed value. `seed` sets every
    /// module seed; module seeds given later override it.
    void set(const std::string& key, const std::string& value);
    static std::vector<std::string> keys();
};

/// `key = value` lines; `#` starts a comment. Applied on top of `base`.
ServiceConfig parse_config(std::string_view text, ServiceConfig base = {});
ServiceConfig load_config(const std::string& path, ServiceConfig base = {});

/// CSPACE_CONFIG when set, else `fallback`.
std::string config_path(const std::string& fallback);

/// Applies a JSON object of overrides; numbers, strings, booleans and string
/// arrays (joined with commas) are accepted.
void apply_overrides(ServiceConfig& config, const nlohmann::json& overrides);

/// Splits `key=value`; Spec error without '='.
std::pair<std::string, std::string> split_assignment(std::string_view text);

}  // namespace cspace
