#include "cspace/analytics/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "cspace/core/error.hpp"

namespace cspace {

using nlohmann::json;

std::string_view to_string(FilterKind kind) noexcept {
    switch (kind) {
        case FilterKind::Range: return "range";
        case FilterKind::Cluster: return "cluster";
        case FilterKind::Reference: return "reference";
    }
    return "unknown";
}

FilterSpec FilterSpec::range(std::string attr, double lo, double hi) {
    FilterSpec s;
    s.kind = FilterKind::Range;
    s.attr = std::move(attr);
    s.lo = lo;
    s.hi = hi;
    return s;
}

FilterSpec FilterSpec::cluster(std::vector<std::string> ids) {
    FilterSpec s;
    s.kind = FilterKind::Cluster;
    s.ids = std::move(ids);
    return s;
}

FilterSpec FilterSpec::reference(std::string id, int top_n) {
    FilterSpec s;
    s.kind = FilterKind::Reference;
    s.ref = std::move(id);
    s.top_n = top_n;
    return s;
}

void FilterSpec::validate() const {
    switch (kind) {
        case FilterKind::Range:
            if (attr.empty()) fail(ErrorKind::Spec, "range filter needs an attribute");
            if (std::isnan(lo) || std::isnan(hi) || lo > hi) fail(ErrorKind::Spec, "range filter needs lo <= hi");
            break;
        case FilterKind::Cluster:
            if (ids.empty()) fail(ErrorKind::Spec, "cluster filter needs ids");
            break;
        case FilterKind::Reference:
            if (ref.empty()) fail(ErrorKind::Spec, "reference filter needs an id");
            if (top_n < 1) fail(ErrorKind::Spec, "reference filter needs top_n >= 1");
            break;
    }
}

json to_json(const FilterSpec& s) {
    switch (s.kind) {
        case FilterKind::Range: return {{"kind", "range"}, {"attr", s.attr}, {"lo", s.lo}, {"hi", s.hi}};
        case FilterKind::Cluster: return {{"kind", "cluster"}, {"ids", s.ids}};
        case FilterKind::Reference: return {{"kind", "reference"}, {"id", s.ref}, {"top_n", s.top_n}};
    }
    return {};
}

FilterSpec filter_from_json(const json& j) {
    FilterSpec s;
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "range") {
            s = FilterSpec::range(j.at("attr").get<std::string>(), j.at("lo").get<double>(), j.at("hi").get<double>());
        } else if (kind == "cluster") {
            s = FilterSpec::cluster(j.at("ids").get<std::vector<std::string>>());
        } else if (kind == "reference") {
            s = FilterSpec::reference(j.at("id").get<std::string>(), j.at("top_n").get<int>());
        } else {
            fail(ErrorKind::Schema, "unknown filter kind " + kind);
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Schema, std::string("bad filter: ") + e.what());
    }
    s.validate();
    return s;
}

std::vector<std::string> apply_filter(const FilterContext& ctx, const std::vector<std::string>& retained,
                                      const FilterSpec& spec) {
    spec.validate();
    const DataTable& t = *ctx.table;
    std::vector<std::size_t> rows;
    for (const auto& id : retained) rows.push_back(t.row_index(id));
    std::vector<std::string> out;

    switch (spec.kind) {
        case FilterKind::Range: {
            const auto c = t.column_index(spec.attr);
            for (auto r : rows) {
                const auto& v = t.at(r, c);
                if (v && *v >= spec.lo && *v <= spec.hi) out.push_back(t.row_ids()[r]);
            }
            break;
        }
        case FilterKind::Cluster: {
            for (const auto& id : spec.ids) (void)t.row_index(id);
            const std::unordered_set<std::string> wanted(spec.ids.begin(), spec.ids.end());
            for (const auto& id : retained) {
                if (wanted.count(id)) out.push_back(id);
            }
            break;
        }
        case FilterKind::Reference: {
            if (!ctx.embedding || ctx.embedding->rows() != t.rows()) {
                fail(ErrorKind::Internal, "reference filter needs an embedding aligned with the table");
            }
            const auto ref = t.row_index(spec.ref);
            if (std::find(rows.begin(), rows.end(), ref) == rows.end()) {
                fail(ErrorKind::Key, "reference " + spec.ref + " is not in the current selection");
            }
            const Matrix& e = *ctx.embedding;
            std::vector<std::pair<double, std::size_t>> dist;
            for (auto r : rows) {
                if (r == ref) continue;
                dist.emplace_back(std::hypot(e(r, 0) - e(ref, 0), e(r, 1) - e(ref, 1)), r);
            }
            std::sort(dist.begin(), dist.end());
            std::set<std::size_t> keep{ref};
            for (std::size_t i = 0; i < dist.size() && i < static_cast<std::size_t>(spec.top_n); ++i) {
                keep.insert(dist[i].second);
            }
            for (auto r : keep) out.push_back(t.row_ids()[r]);
            break;
        }
    }
    return out;
}

HistoryTree::HistoryTree(std::vector<std::string> all_ids) {
    HistoryNode root;
    root.retained = std::move(all_ids);
    nodes_.push_back(std::move(root));
}

const HistoryNode& HistoryTree::node(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) fail(ErrorKind::Key, "unknown history node " + std::to_string(id));
    return nodes_[static_cast<std::size_t>(id)];
}

int HistoryTree::add(int parent, FilterSpec filter, std::vector<std::string> retained, std::optional<TopVariation> top) {
    (void)node(parent);
    HistoryNode n;
    n.id = static_cast<int>(nodes_.size());
    n.parent = parent;
    n.filter = std::move(filter);
    n.retained = std::move(retained);
    n.top_variation = std::move(top);
    nodes_[static_cast<std::size_t>(parent)].children.push_back(n.id);
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
}

std::vector<int> HistoryTree::path(int id) const {
    std::vector<int> out;
    for (std::optional<int> cur = node(id).id; cur; cur = node(*cur).parent) out.push_back(*cur);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::string> replay(const HistoryTree& tree, int id, const FilterContext& ctx) {
    const auto p = tree.path(id);
    std::vector<std::string> retained = tree.node(p.front()).retained;
    for (std::size_t i = 1; i < p.size(); ++i) retained = apply_filter(ctx, retained, *tree.node(p[i]).filter);
    return retained;
}

json to_json(const HistoryTree& tree, int current) {
    json nodes = json::array(), edges = json::array();
    for (const auto& n : tree.nodes()) {
        json j = {{"id", n.id},
                  {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                  {"filter", n.filter ? to_json(*n.filter) : json(nullptr)},
                  {"retained_count", n.retained.size()},
                  {"children", n.children}};
        if (n.top_variation) {
            const auto& v = *n.top_variation;
            j["top_variation"] = {{"attr", v.attr}, {"f", std::isinf(v.f) ? json("+inf") : json(v.f)}};
        } else {
            j["top_variation"] = nullptr;
        }
        nodes.push_back(std::move(j));
        if (n.parent) edges.push_back({{"from", *n.parent}, {"to", n.id}, {"retained_count", n.retained.size()}});
    }
    return {{"current", current}, {"nodes", nodes}, {"edges", edges}};
}

}  // namespace cspace
