#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cspace/analytics/filter.hpp"
#include "cspace/analytics/stats.hpp"
#include "cspace/core/rng.hpp"
#include "helpers.hpp"

using namespace cspace;

namespace {

DataTable small_table() {
    return DataTable(test::ids(3), {test::col("a", {5.0, 15.0, std::nullopt}), test::col("b", {1.0, 2.0, 3.0})});
}

// Pooled-variance two-sample t statistic.
double t_statistic(const std::vector<double>& x, const std::vector<double>& y) {
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double a : v) s += a;
        return s / static_cast<double>(v.size());
    };
    const double mx = mean(x), my = mean(y);
    double sx = 0, sy = 0;
    for (double a : x) sx += (a - mx) * (a - mx);
    for (double a : y) sy += (a - my) * (a - my);
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    const double pooled = (sx + sy) / (nx + ny - 2);
    return (mx - my) / std::sqrt(pooled * (1 / nx + 1 / ny));
}

}  // namespace

TEST_CASE("range filter keeps inclusive matches and skips missing") {
    const auto t = small_table();
    FilterContext ctx{&t, nullptr};
    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::range("a", 0, 10)) == std::vector<std::string>{"r1"});
    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::range("a", 5, 15)) == std::vector<std::string>{"r1", "r2"});
    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::range("a", 100, 200)).empty());
    CHECK_ERROR(apply_filter(ctx, t.row_ids(), FilterSpec::range("zz", 0, 1)), ErrorKind::Key);
    CHECK_ERROR(apply_filter(ctx, t.row_ids(), FilterSpec::range("a", 2, 1)), ErrorKind::Spec);
}

TEST_CASE("cluster and reference filters") {
    const auto t = small_table();
    Matrix emb(3, 2, std::vector<double>{0, 0, 1, 0, 5, 0});
    FilterContext ctx{&t, &emb};
    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::cluster({"r3", "r1"})) == std::vector<std::string>{"r1", "r3"});
    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::cluster(t.row_ids())) == t.row_ids());
    CHECK_ERROR(apply_filter(ctx, t.row_ids(), FilterSpec::cluster({"nope"})), ErrorKind::Key);
    CHECK_ERROR(apply_filter(ctx, t.row_ids(), FilterSpec::cluster({})), ErrorKind::Spec);

    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::reference("r3", 1)) == std::vector<std::string>{"r2", "r3"});
    CHECK(apply_filter(ctx, t.row_ids(), FilterSpec::reference("r1", 10)).size() == 3);
    CHECK_ERROR(apply_filter(ctx, {"r1", "r2"}, FilterSpec::reference("r3", 1)), ErrorKind::Key);
    CHECK_ERROR(apply_filter(ctx, t.row_ids(), FilterSpec::reference("r1", 0)), ErrorKind::Spec);
}

TEST_CASE("reference filter returns the brute-force nearest set") {
    Rng rng(4);
    const std::size_t n = 60;
    std::vector<Column> cols{test::col("v", std::vector<Cell>(n, 1.0))};
    const DataTable t(test::ids(n), cols);
    Matrix emb(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        emb(i, 0) = rng.normal();
        emb(i, 1) = rng.normal();
    }
    FilterContext ctx{&t, &emb};
    for (int top : {1, 5, 30}) {
        const auto got = apply_filter(ctx, t.row_ids(), FilterSpec::reference("r7", top));
        CHECK(got.size() == static_cast<std::size_t>(top) + 1);
        // Everything kept is at least as close as everything dropped.
        double worst_kept = 0, best_dropped = INFINITY;
        const std::set<std::string> kept(got.begin(), got.end());
        CHECK(kept.count("r7") == 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 6) continue;
            const double d = std::hypot(emb(i, 0) - emb(6, 0), emb(i, 1) - emb(6, 1));
            if (kept.count(t.row_ids()[i])) worst_kept = std::max(worst_kept, d);
            else best_dropped = std::min(best_dropped, d);
        }
        CHECK(worst_kept <= best_dropped);
    }
}

TEST_CASE("filter JSON round trip and validation") {
    for (const auto& s : {FilterSpec::range("a", -1, 2.5), FilterSpec::cluster({"x", "y"}), FilterSpec::reference("x", 30)}) {
        CHECK(filter_from_json(to_json(s)) == s);
    }
    CHECK_ERROR(filter_from_json(nlohmann::json::parse(R"({"kind":"range","attr":"a","lo":3,"hi":1})")), ErrorKind::Spec);
    CHECK_ERROR(filter_from_json(nlohmann::json::parse(R"({"kind":"range","attr":"a"})")), ErrorKind::Schema);
    CHECK_ERROR(filter_from_json(nlohmann::json::parse(R"({"kind":"lasso"})")), ErrorKind::Schema);
    CHECK_ERROR(filter_from_json(nlohmann::json::parse(R"([1,2])")), ErrorKind::Schema);
}

TEST_CASE("history tree: subsets along paths and exact replay") {
    Rng rng(12);
    const std::size_t n = 80;
    std::vector<Cell> a(n), b(n);
    Matrix emb(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform() < 0.1 ? Cell{} : Cell{rng.uniform() * 10};
        b[i] = rng.normal();
        emb(i, 0) = rng.normal();
        emb(i, 1) = rng.normal();
    }
    const DataTable t(test::ids(n), {test::col("a", a), test::col("b", b)});
    FilterContext ctx{&t, &emb};
    HistoryTree tree(t.row_ids());
    int cur = 0;
    for (int step = 0; step < 30; ++step) {
        // Branch from a random existing node.
        const int parent = static_cast<int>(rng.below(tree.nodes().size()));
        const auto& base = tree.node(parent).retained;
        FilterSpec spec;
        const auto pick = rng.below(3);
        if (pick == 0 || base.empty()) {
            const double lo = rng.uniform() * 8;
            spec = FilterSpec::range(rng.uniform() < 0.5 ? "a" : "b", lo - 4, lo + 3);
        } else if (pick == 1) {
            std::vector<std::string> ids;
            for (const auto& id : base) {
                if (rng.uniform() < 0.6) ids.push_back(id);
            }
            if (ids.empty()) ids.push_back(base.front());
            spec = FilterSpec::cluster(ids);
        } else {
            spec = FilterSpec::reference(base[rng.below(base.size())], 1 + static_cast<int>(rng.below(20)));
        }
        auto kept = apply_filter(ctx, base, spec);
        cur = tree.add(parent, spec, kept, std::nullopt);
    }
    for (const auto& node : tree.nodes()) {
        if (node.parent) {
            const auto& up = tree.node(*node.parent).retained;
            const std::set<std::string> parent_set(up.begin(), up.end());
            for (const auto& id : node.retained) CHECK(parent_set.count(id) == 1);
            CHECK(node.retained.size() <= up.size());
        }
        CHECK(replay(tree, node.id, ctx) == node.retained);
        CHECK(tree.path(node.id).front() == 0);
    }
    const auto j = to_json(tree, cur);
    CHECK(j["nodes"].size() == tree.nodes().size());
    CHECK(j["edges"].size() == tree.nodes().size() - 1);
    CHECK(j["current"] == cur);
    CHECK_ERROR(tree.node(999), ErrorKind::Key);
}

TEST_CASE("anova examples") {
    const DataTable t(test::ids(6), {test::col("x", {1.0, 2.0, 3.0, 4.0, 5.0, 6.0})});
    const auto top = anova_top_attribute(t, {0, 0, 0, 1, 1, 1});
    REQUIRE(top);
    CHECK(top->attr == "x");
    CHECK(std::abs(top->f - 13.5) < 1e-9);

    const DataTable flat(test::ids(4), {test::col("p", {1.0, 1.0, 2.0, 2.0}), test::col("q", {1.0, 2.0, 3.0, 9.0})});
    const auto scores = anova_scores(flat, {0, 0, 1, 1});
    REQUIRE(scores.size() == 2);
    CHECK(scores[0].attr == "p");
    CHECK(std::isinf(scores[0].f));
    CHECK(std::isfinite(scores[1].f));

    const DataTable same(test::ids(4), {test::col("m", {1.0, 2.0, 1.0, 2.0}), test::col("k", {3.0, 5.0, 3.0, 5.0})});
    const auto z = anova_scores(same, {0, 0, 1, 1});
    CHECK(z[0].f == doctest::Approx(0.0));
    CHECK(z[1].f == doctest::Approx(0.0));
    CHECK(z[0].attr == "k");

    CHECK_ERROR(anova_top_attribute(t, {0, 0, 0, 0, 0, 1}), ErrorKind::InsufficientData);

    // A group without observed values skips the attribute.
    const DataTable gap(test::ids(4), {test::col("g", {1.0, 2.0, std::nullopt, std::nullopt}), test::col("h", {1.0, 2.0, 3.0, 4.0})});
    const auto g = anova_scores(gap, {0, 0, 1, 1});
    REQUIRE(g.size() == 1);
    CHECK(g[0].attr == "h");
}

TEST_CASE("anova on two groups equals the squared t statistic") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.below(30);
        std::vector<Cell> v(n);
        std::vector<int> groups(n);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            groups[i] = i < 2 ? 0 : (i < 4 ? 1 : static_cast<int>(rng.below(2)));
            const double value = rng.normal(groups[i] * rng.uniform(), 1.0 + rng.uniform());
            v[i] = value;
            (groups[i] == 0 ? x : y).push_back(value);
        }
        const DataTable t(test::ids(n), {test::col("v", v)});
        const auto top = anova_top_attribute(t, groups);
        REQUIRE(top);
        const double tt = t_statistic(x, y);
        CHECK(std::abs(top->f - tt * tt) < 1e-9 * std::max(1.0, tt * tt));
    }
}

TEST_CASE("axis stats examples") {
    const DataTable t(test::ids(5), {test::col("a_x", {1.0, 2.0, 3.0, 4.0, 5.0}),
                                     test::col("c", {7.0, 7.0, 7.0, std::nullopt, 7.0})});
    const auto s = axis_stats(t, "a_x", 4);
    CHECK(s.median == 3);
    CHECK(s.q1 == 2);
    CHECK(s.q3 == 4);
    CHECK(s.min == 1);
    CHECK(s.max == 5);
    CHECK(s.group == "a");
    CHECK(s.counts.size() == 4);
    CHECK(s.edges.size() == 5);

    const auto c = axis_stats(t, "c", 3);
    CHECK(c.min == 7);
    CHECK(c.q1 == 7);
    CHECK(c.median == 7);
    CHECK(c.max == 7);
    CHECK(std::count_if(c.counts.begin(), c.counts.end(), [](int k) { return k > 0; }) == 1);
    CHECK(c.missing == 1);

    const DataTable four(test::ids(4), {test::col("z", {0.0, 1.0, 2.0, 3.0})});
    CHECK(axis_stats(four, "z", 2).counts == std::vector<int>{2, 2});
    CHECK(axis_stats(four, "z", 2, {0, 1}).counts == std::vector<int>{1, 1});

    const DataTable none(test::ids(2), {test::col("e", {std::nullopt, std::nullopt})});
    CHECK_ERROR(axis_stats(none, "e", 2), ErrorKind::EmptyColumn);
    CHECK_ERROR(axis_stats(four, "z", 0), ErrorKind::Spec);
    CHECK_ERROR(axis_stats(four, "missing", 2), ErrorKind::Key);
}

TEST_CASE("axis stats properties on random columns") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<Cell> v(n);
        std::size_t observed = 0;
        for (auto& c : v) {
            if (rng.uniform() < 0.2) continue;
            c = rng.normal() * 5;
            ++observed;
        }
        if (observed == 0) v[0] = 1.0, observed = 1;
        const DataTable t(test::ids(n), {test::col("v", v)});
        const int bins = 1 + static_cast<int>(rng.below(10));
        const auto s = axis_stats(t, "v", bins);
        CHECK(s.min <= s.q1);
        CHECK(s.q1 <= s.median);
        CHECK(s.median <= s.q3);
        CHECK(s.q3 <= s.max);
        int total = 0;
        for (int k : s.counts) total += k;
        CHECK(static_cast<std::size_t>(total) == observed);
        CHECK(s.observed + s.missing == n);
    }
}

TEST_CASE("uncertainty pairs") {
    const UncertaintyMap u{{"a", {{"c1", 0.0}, {"c2", 5.0}, {"c3", 7.0}}}, {"b", {{"c1", 0.0}, {"c2", 25.0}}}};
    const auto s = uncertainty_pairs({{"a", "b"}}, u, {"c1", "c2", "c3", "c4"});
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].points.size() == 3);
    CHECK(s[0].points[0].u_a == 0.0);
    CHECK(s[0].points[0].u_b == 0.0);
    CHECK(s[0].points[1].u_a == 5.0);
    CHECK(s[0].points[1].u_b == 25.0);
    CHECK(s[0].points[2].missing_b);
    CHECK(s[0].points[2].u_b == 0.0);
    CHECK_FALSE(s[0].points[2].missing_a);
    // c4 has no predicted cell in either attribute.
    for (const auto& p : s[0].points) CHECK(p.id != "c4");
}
