#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cspace/core/matrix.hpp"
#include "cspace/data/table.hpp"

namespace cspace {

enum class FilterKind { Range, Cluster, Reference };

std::string_view to_string(FilterKind kind) noexcept;

struct FilterSpec {
    FilterKind kind = FilterKind::Range;
    std::string attr;               // Range
    double lo = 0.0, hi = 0.0;      // Range, inclusive
    std::vector<std::string> ids;   // Cluster
    std::string ref;                // Reference
    int top_n = 1;                  // Reference

    static FilterSpec range(std::string attr, double lo, double hi);
    static FilterSpec cluster(std::vector<std::string> ids);
    static FilterSpec reference(std::string id, int top_n);

    /// Spec error on lo > hi, non-finite bounds, empty ids or top_n < 1.
    void validate() const;
    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

nlohmann::json to_json(const FilterSpec& spec);
/// Schema error on malformed JSON, Spec error on invalid values.
FilterSpec filter_from_json(const nlohmann::json& j);

/// What filters are evaluated against: the table for ranges and the 2D
/// embedding (rows aligned with the table) for reference filters.
struct FilterContext {
    const DataTable* table = nullptr;
    const Matrix* embedding = nullptr;
};

/// Applies `spec` to the retained row ids (kept in table order). Key error
/// for an unknown attribute or id, or a reference outside `retained`.
std::vector<std::string> apply_filter(const FilterContext& ctx, const std::vector<std::string>& retained,
                                      const FilterSpec& spec);

struct TopVariation {
    std::string attr;
    double f = 0.0;  // +infinity when within-group variance is zero
};

struct HistoryNode {
    int id = 0;
    std::optional<int> parent;
    std::optional<FilterSpec> filter;  // empty at the root
    std::vector<std::string> retained;
    std::optional<TopVariation> top_variation;
    std::vector<int> children;
};

/// Exploration history. Node ids are assigned in creation order from 0.
class HistoryTree {
public:
    explicit HistoryTree(std::vector<std::string> all_ids);

    const HistoryNode& node(int id) const;  // Key error when absent
    const std::vector<HistoryNode>& nodes() const noexcept { return nodes_; }
    int add(int parent, FilterSpec filter, std::vector<std::string> retained, std::optional<TopVariation> top);
    /// Node ids from the root to `id`.
    std::vector<int> path(int id) const;

private:
    std::vector<HistoryNode> nodes_;
};

/// Re-applies the filters on the path to `id` starting from the root set.
std::vector<std::string> replay(const HistoryTree& tree, int id, const FilterContext& ctx);

nlohmann::json to_json(const HistoryTree& tree, int current);

}  // namespace cspace
