#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cspace/analytics/filter.hpp"
#include "cspace/data/table.hpp"

namespace cspace {

/// One-way ANOVA F of every attribute over observed values, rows with group
/// -1 left out. Attributes where some group has no observed value, or with
/// no within-group degrees of freedom, are skipped. Sorted by F descending
/// (+infinity first), then by name.
std::vector<TopVariation> anova_scores(const DataTable& table, const std::vector<int>& group_of_row);

/// Highest-F attribute. InsufficientData unless at least two groups have at
/// least two members; empty when every attribute is skipped.
std::optional<TopVariation> anova_top_attribute(const DataTable& table, const std::vector<int>& group_of_row);

struct AxisStats {
    std::string attr;
    std::string group;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    std::vector<double> edges;  // bins + 1 boundaries
    std::vector<int> counts;    // sum to the observed count
    std::size_t observed = 0;
    std::size_t missing = 0;
};

/// Quantiles by linear interpolation between order statistics; equal-width
/// bins over [min, max] with the maximum in the last bin. `rows` restricts
/// the computation (all rows when empty). EmptyColumn without observed
/// values, Spec error for bins < 1.
AxisStats axis_stats(const DataTable& table, const std::string& attr, int bins,
                     const std::vector<std::size_t>& rows = {});

/// Linear-interpolation quantile of sorted values, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Percent uncertainty per attribute per row id; only predicted cells appear.
using UncertaintyMap = std::map<std::string, std::map<std::string, double>>;

struct UncertaintyPoint {
    std::string id;
    double u_a = 0.0;
    double u_b = 0.0;
    bool missing_a = false;
    bool missing_b = false;
};

struct UncertaintyScatter {
    std::string attr_a;
    std::string attr_b;
    std::vector<UncertaintyPoint> points;
};

/// One scatter per attribute pair. A compound without either uncertainty is
/// left out; one without a single coordinate gets 0 there and a flag.
std::vector<UncertaintyScatter> uncertainty_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                                  const UncertaintyMap& uncertainty,
                                                  const std::vector<std::string>& ids);

nlohmann::json to_json(const TopVariation& v);
nlohmann::json to_json(const AxisStats& s);
nlohmann::json to_json(const UncertaintyScatter& s);

}  // namespace cspace
