#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cspace/analytics/filter.hpp"
#include "cspace/analytics/stats.hpp"
#include "cspace/core/error.hpp"
#include "cspace/core/matrix.hpp"
#include "cspace/data/table.hpp"
#include "cspace/embed/dbscan.hpp"
#include "cspace/explain/shap.hpp"
#include "cspace/predict/ngboost.hpp"
#include "cspace/service/config.hpp"

namespace cspace {

/// A failure while building a session, tagged with the pipeline stage
/// (load, threshold_filter, impute, predict, explain, embed, cluster, layout).
class PipelineError : public Error {
public:
    PipelineError(std::string stage, ErrorKind kind, const std::string& what)
        : Error(kind, what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Request-level failure carrying its HTTP status.
class HttpError : public std::runtime_error {
public:
    HttpError(int status, std::string code, const std::string& what)
        : std::runtime_error(what), status_(status), code_(std::move(code)) {}
    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }

private:
    int status_;
    std::string code_;
};

/// Circle size of a predicted cell: 1 - RSD/100 clamped to [0.1, 1]; 0.1
/// when the RSD is undefined.
double radius_scalar(std::optional<double> rsd_percent);

struct TargetModel {
    std::string target;
    ProbModel model;
    std::vector<std::string> shap_features;  // pre-selected by |r| with the target
    Matrix phi;                              // rows x shap_features
    std::vector<FeatureScore> importance;
};

/// One exploration session over a dataset. Public methods lock the session
/// mutex, so commands on a session serialize; discovery drops the lock while
/// the layout runs and holds the single layout slot instead.
class Session {
public:
    /// Runs imputation, prediction, attribution and embedding. Throws
    /// PipelineError naming the failing stage.
    Session(std::string id, const DataTable& raw, ServiceConfig config);

    const std::string& id() const noexcept { return id_; }

    nlohmann::json summary() const;
    /// With `replay_node`, also the ids obtained by re-applying the filters on
    /// the path to that node.
    nlohmann::json history(std::optional<int> replay_node = std::nullopt) const;
    /// Body {"filter": FilterSpec, "parent": optional node}. Throws Error
    /// (Schema, Spec, Key) on a bad request.
    nlohmann::json post_filter(const nlohmann::json& body);
    /// Body {"attributes": [...]}, 1 to 15 known attributes.
    nlohmann::json set_key_attributes(const nlohmann::json& body);
    nlohmann::json distribution(int bins) const;
    /// Cached per (node, key attributes). HttpError 409 when the layout slot
    /// is taken.
    nlohmann::json discovery(const std::atomic<bool>* cancel = nullptr);
    /// HttpError 400 for ids outside the current node.
    nlohmann::json comparison(const std::vector<std::string>& ids) const;

    /// The single layout slot; false when a layout is already running.
    bool begin_layout() noexcept;
    void end_layout() noexcept;

    const DataTable& table() const noexcept { return table_; }
    const CellProvenance& provenance() const noexcept { return provenance_; }
    const Matrix& embedding() const noexcept { return embedding_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& key_attributes() const noexcept { return keys_; }
    const UncertaintyMap& uncertainty() const noexcept { return uncertainty_; }
    const std::map<std::string, TargetModel>& models() const noexcept { return models_; }
    int current() const noexcept { return current_; }
    const HistoryTree& tree() const noexcept { return tree_; }

private:
    void compute_factors();
    void compute_embedding();
    std::vector<std::size_t> rows_of(const std::vector<std::string>& ids) const;
    nlohmann::json glyph_payload(const LayoutScene& scene) const;

    std::string id_;
    ServiceConfig config_;
    DataTable table_;  // imputed features and predicted targets, complete
    DataTable normalized_;
    CellProvenance provenance_;
    ImputationReport report_;
    std::vector<std::string> targets_;
    std::map<std::string, TargetModel> models_;
    UncertaintyMap uncertainty_;
    std::vector<std::string> keys_;
    InfluenceSet factors_;
    Matrix embedding_;
    std::vector<int> labels_;
    HistoryTree tree_;
    int current_ = 0;
    int keys_version_ = 0;

    mutable std::mutex mutex_;
    std::atomic<bool> layout_running_{false};
    std::map<std::pair<int, int>, nlohmann::json> layout_cache_;
};

}  // namespace cspace
