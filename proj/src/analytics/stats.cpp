#include "cspace/analytics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cspace/core/error.hpp"

namespace cspace {

using nlohmann::json;

std::vector<TopVariation> anova_scores(const DataTable& table, const std::vector<int>& group_of_row) {
    if (group_of_row.size() != table.rows()) fail(ErrorKind::Shape, "one group per row is required");
    int k = 0;
    for (int g : group_of_row) k = std::max(k, g + 1);
    std::vector<TopVariation> out;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        std::vector<int> cnt(static_cast<std::size_t>(k), 0);
        double total = 0.0;
        int n = 0;
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const int g = group_of_row[r];
            const auto& v = table.at(r, c);
            if (g < 0 || !v) continue;
            sum[static_cast<std::size_t>(g)] += *v;
            ++cnt[static_cast<std::size_t>(g)];
            total += *v;
            ++n;
        }
        // Only groups that have members at all count; a member group with no
        // observed value in this column skips the column.
        int groups = 0;
        bool skip = false;
        for (int g = 0; g < k; ++g) {
            const bool member = std::find(group_of_row.begin(), group_of_row.end(), g) != group_of_row.end();
            if (!member) continue;
            ++groups;
            if (cnt[static_cast<std::size_t>(g)] == 0) skip = true;
        }
        if (skip || groups < 2 || n - groups < 1) continue;
        const double grand = total / n;
        double ssb = 0.0, ssw = 0.0;
        for (int g = 0; g < k; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            if (cnt[gi] == 0) continue;
            const double m = sum[gi] / cnt[gi];
            ssb += cnt[gi] * (m - grand) * (m - grand);
        }
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const int g = group_of_row[r];
            const auto& v = table.at(r, c);
            if (g < 0 || !v) continue;
            const auto gi = static_cast<std::size_t>(g);
            const double d = *v - sum[gi] / cnt[gi];
            ssw += d * d;
        }
        double f;
        // Relative cut so rounding noise in identical groups reads as zero.
        const double scale = std::max(1.0, grand * grand) * n * 1e-24;
        if (ssw <= scale) f = ssb <= scale ? 0.0 : std::numeric_limits<double>::infinity();
        else f = (ssb / (groups - 1)) / (ssw / (n - groups));
        out.push_back({table.column(c).name, f});
    }
    std::sort(out.begin(), out.end(), [](const TopVariation& a, const TopVariation& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.attr < b.attr;
    });
    return out;
}

std::optional<TopVariation> anova_top_attribute(const DataTable& table, const std::vector<int>& group_of_row) {
    std::map<int, int> sizes;
    for (int g : group_of_row) {
        if (g >= 0) ++sizes[g];
    }
    int big = 0;
    for (const auto& [g, s] : sizes) big += s >= 2 ? 1 : 0;
    if (big < 2) fail(ErrorKind::InsufficientData, "ANOVA needs two groups with at least two members");
    const auto scores = anova_scores(table, group_of_row);
    if (scores.empty()) return std::nullopt;
    return scores.front();
}

double quantile_sorted(const std::vector<double>& v, double p) {
    if (v.empty()) fail(ErrorKind::EmptyColumn, "quantile of no values");
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

AxisStats axis_stats(const DataTable& table, const std::string& attr, int bins, const std::vector<std::size_t>& rows) {
    if (bins < 1) fail(ErrorKind::Spec, "bins must be >= 1");
    const auto c = table.column_index(attr);
    AxisStats s;
    s.attr = attr;
    s.group = attribute_group(table.column(c));
    std::vector<double> v;
    auto visit = [&](std::size_t r) {
        const auto& cell = table.at(r, c);
        if (cell) v.push_back(*cell);
        else ++s.missing;
    };
    if (rows.empty()) {
        for (std::size_t r = 0; r < table.rows(); ++r) visit(r);
    } else {
        for (auto r : rows) visit(r);
    }
    if (v.empty()) fail(ErrorKind::EmptyColumn, "no observed values in " + attr);
    std::sort(v.begin(), v.end());
    s.observed = v.size();
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    const double width = (s.max - s.min) / bins;
    for (int b = 0; b <= bins; ++b) s.edges.push_back(b == bins ? s.max : s.min + b * width);
    s.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double x : v) {
        int b = width > 0 ? static_cast<int>(std::floor((x - s.min) / width)) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++s.counts[static_cast<std::size_t>(b)];
    }
    return s;
}

std::vector<UncertaintyScatter> uncertainty_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                                  const UncertaintyMap& uncertainty,
                                                  const std::vector<std::string>& ids) {
    static const std::map<std::string, double> none;
    std::vector<UncertaintyScatter> out;
    for (const auto& [a, b] : pairs) {
        const auto ia = uncertainty.find(a), ib = uncertainty.find(b);
        const auto& ua = ia == uncertainty.end() ? none : ia->second;
        const auto& ub = ib == uncertainty.end() ? none : ib->second;
        UncertaintyScatter s{a, b, {}};
        for (const auto& id : ids) {
            const auto pa = ua.find(id), pb = ub.find(id);
            if (pa == ua.end() && pb == ub.end()) continue;
            UncertaintyPoint p{id, 0.0, 0.0, pa == ua.end(), pb == ub.end()};
            if (!p.missing_a) p.u_a = pa->second;
            if (!p.missing_b) p.u_b = pb->second;
            s.points.push_back(std::move(p));
        }
        out.push_back(std::move(s));
    }
    return out;
}

json to_json(const TopVariation& v) {
    return {{"attr", v.attr}, {"f", std::isinf(v.f) ? json("+inf") : json(v.f)}};
}

json to_json(const AxisStats& s) {
    return {{"attr", s.attr},
            {"group", s.group},
            {"quantiles", {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}}},
            {"edges", s.edges},
            {"counts", s.counts},
            {"observed", s.observed},
            {"missing", s.missing}};
}

json to_json(const UncertaintyScatter& s) {
    json pts = json::array();
    for (const auto& p : s.points) {
        pts.push_back({{"id", p.id}, {"u_a", p.u_a}, {"u_b", p.u_b}, {"missing_a", p.missing_a}, {"missing_b", p.missing_b}});
    }
    return {{"attr_a", s.attr_a}, {"attr_b", s.attr_b}, {"points", pts}};
}

}  // namespace cspace
