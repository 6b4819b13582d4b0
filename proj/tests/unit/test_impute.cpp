#include <algorithm>
#include <cmath>
#include <set>

#include "cspace/core/rng.hpp"
#include "cspace/data/synth.hpp"
#include "cspace/impute/cami.hpp"
#include "cspace/impute/correlation.hpp"
#include "helpers.hpp"

using namespace cspace;
using cspace::test::col;

namespace {

CorrelationMatrix manual_cm(std::vector<std::string> attrs, const std::vector<std::vector<std::optional<double>>>& rows) {
    CorrelationMatrix cm;
    cm.attrs = std::move(attrs);
    for (const auto& row : rows) cm.r.insert(cm.r.end(), row.begin(), row.end());
    return cm;
}

double rmse_on_masked(const DataTable& filled, const SynthData& data) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < filled.cols(); ++c) {
        const auto tc = data.truth.column_index(filled.column(c).name);
        for (std::size_t r = 0; r < filled.rows(); ++r) {
            const auto tr = data.truth.row_index(filled.row_ids()[r]);
            if (!data.masked.missing(tr, tc)) continue;
            const double d = *filled.at(r, c) - *data.truth.at(tr, tc);
            sum += d * d;
            ++n;
        }
    }
    return std::sqrt(sum / static_cast<double>(n));
}

}  // namespace

TEST_CASE("threshold_filter: column over A is dropped") {
    const DataTable t(test::ids(4), {col("a", {1.0, {}, {}, {}}), col("b", {1.0, 2.0, 3.0, 4.0})});
    const auto out = threshold_filter(t, {0.5, 1.0, 1, 1});
    CHECK(out.dropped_columns == std::vector<std::string>{"a"});
    CHECK(out.table.cols() == 1);
}

TEST_CASE("threshold_filter: A=B=1 keeps everything without fully missing rows or columns") {
    const DataTable t(test::ids(3), {col("a", {1.0, {}, 3.0}), col("b", {{}, 2.0, 3.0})});
    const auto out = threshold_filter(t, {1.0, 1.0, 1, 1});
    CHECK(out.table == t);
    CHECK(out.dropped_columns.empty());
    CHECK(out.dropped_rows.empty());
}

TEST_CASE("threshold_filter: row fraction uses surviving columns") {
    // Column d is dropped (3/4 missing); row r2 then misses 2 of the 3
    // surviving columns: 2/3 >= 0.6.
    const DataTable t(test::ids(4), {col("a", {1.0, {}, 3.0, 4.0}),
                                     col("b", {1.0, {}, 3.0, 4.0}),
                                     col("c", {1.0, 2.0, 3.0, 4.0}),
                                     col("d", {1.0, {}, {}, {}})});
    const auto out = threshold_filter(t, {0.7, 0.6, 1, 1});
    CHECK(out.dropped_columns == std::vector<std::string>{"d"});
    CHECK(out.dropped_rows == std::vector<std::string>{"r2"});
    CHECK(out.table.rows() == 3);
}

TEST_CASE("threshold_filter: everything dropped is an error") {
    const DataTable t(test::ids(2), {col("a", {Cell{}, Cell{}})});
    CHECK_ERROR(threshold_filter(t, {0.5, 1.0, 1, 1}), ErrorKind::EmptyResult);
    CHECK_ERROR(threshold_filter(t, {0.0, 1.0, 1, 1}), ErrorKind::Spec);
}

TEST_CASE("threshold_filter is monotone in A and B") {
    // Row fractions are taken over surviving columns, so each threshold is
    // varied with the other one held fixed.
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = synth_generate({30, 5, 0.4, 0.35, static_cast<std::uint64_t>(trial)});
        const double a_hi = 0.3 + 0.6 * rng.uniform(), a_lo = a_hi * rng.uniform() + 0.05;
        const double b_hi = 0.3 + 0.6 * rng.uniform(), b_lo = b_hi * rng.uniform() + 0.05;
        std::optional<ThresholdResult> hi, lo_a, lo_b;
        try {
            hi = threshold_filter(d.masked, {a_hi, b_hi, 1, 1});
            lo_a = threshold_filter(d.masked, {a_lo, b_hi, 1, 1});
            lo_b = threshold_filter(d.masked, {a_hi, b_lo, 1, 1});
        } catch (const Error&) {
            continue;
        }
        CHECK(lo_a->dropped_columns.size() >= hi->dropped_columns.size());
        CHECK(lo_b->dropped_columns == hi->dropped_columns);
        CHECK(lo_b->dropped_rows.size() >= hi->dropped_rows.size());
    }
}

TEST_CASE("pairwise_pearson examples") {
    const DataTable t(test::ids(5), {col("x", {1.0, 2.0, 3.0, 4.0, 5.0}), col("y", {-1.0, -2.0, -3.0, -4.0, -5.0})});
    const auto cm = pairwise_pearson(t);
    CHECK(*cm.at(0, 0) == 1.0);
    CHECK(*cm.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-15));

    const DataTable ab(test::ids(4), {col("a", {1.0, 2.0, 3.0, {}}), col("b", {2.0, 4.0, {}, 8.0})});
    const auto cm2 = pairwise_pearson(ab);
    CHECK(*cm2.at(0, 1) == doctest::Approx(1.0).epsilon(1e-15));

    const DataTable sparse(test::ids(3), {col("a", {1.0, {}, {}}), col("b", {2.0, 3.0, {}}), col("c", {5.0, 5.0, 5.0})});
    const auto cm3 = pairwise_pearson(sparse);
    CHECK_FALSE(cm3.at(0, 1).has_value());
    CHECK_FALSE(cm3.at(1, 2).has_value());  // constant column
}

TEST_CASE("pairwise_pearson is symmetric and bounded") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = synth_generate({25, 6, 0.6, 0.3, seed});
        const auto cm = pairwise_pearson(d.masked);
        for (std::size_t i = 0; i < cm.size(); ++i) {
            for (std::size_t j = 0; j < cm.size(); ++j) {
                REQUIRE(cm.at(i, j).has_value() == cm.at(j, i).has_value());
                if (!cm.at(i, j)) continue;
                CHECK(*cm.at(i, j) == *cm.at(j, i));
                CHECK(*cm.at(i, j) >= -1.0);
                CHECK(*cm.at(i, j) <= 1.0);
            }
        }
    }
}

TEST_CASE("top_correlated ranking") {
    const auto cm = manual_cm({"t", "a", "b", "c"}, {{1.0, 0.9, -0.95, 0.1},
                                                     {0.9, 1.0, 0.0, 0.0},
                                                     {-0.95, 0.0, 1.0, 0.0},
                                                     {0.1, 0.0, 0.0, 1.0}});
    CHECK(top_correlated(cm, "t", 2) == std::vector<std::string>{"b", "a"});
    CHECK(top_correlated(cm, "t", 10).size() == 3);
    CHECK_ERROR(top_correlated(cm, "zzz", 1), ErrorKind::Key);

    const auto tie = manual_cm({"t", "x", "m", "u"}, {{1.0, 0.5, -0.5, std::nullopt},
                                                      {0.5, 1.0, 0.0, 0.0},
                                                      {-0.5, 0.0, 1.0, 0.0},
                                                      {std::nullopt, 0.0, 0.0, 1.0}});
    CHECK(top_correlated(tie, "t", 5) == std::vector<std::string>{"m", "x"});
}

TEST_CASE("knn_similar_rows") {
    const DataTable t({"c1", "c2", "c3", "c4", "c5"},
                      {col("k1", {0.0, 1.0, 2.0, 3.0, 5.0}), col("k2", {0.0, 0.0, 0.0, 0.0, 5.0})});
    const std::vector<std::size_t> all{1, 2, 3, 4};
    // Query row c5 is identical to itself when offered as a candidate.
    const std::vector<std::size_t> with_self{0, 4};
    CHECK(knn_similar_rows(t, 4, with_self, 1) == std::vector<std::size_t>{4});
    // Distances 1 and 2 from c1.
    const std::vector<std::size_t> near_far{2, 1};
    CHECK(knn_similar_rows(t, 0, near_far, 1) == std::vector<std::size_t>{1});
    // c1, c3 and c5-like points equidistant from c2 in a symmetric layout.
    const DataTable eq({"a", "b", "c", "d"}, {col("k", {0.0, 1.0, -1.0, 1.0})});
    const std::vector<std::size_t> cands{3, 2, 1};
    CHECK(knn_similar_rows(eq, 0, cands, 2) == std::vector<std::size_t>{1, 2});
    CHECK_ERROR(knn_similar_rows(t, 0, std::vector<std::size_t>{}, 1), ErrorKind::EmptyCandidates);
}

TEST_CASE("cami_impute: complete table is unchanged") {
    const DataTable t(test::ids(3), {col("a", {1.0, 2.0, 3.0}), col("b", {3.0, 1.0, 2.0})});
    const auto out = cami_impute(t, {});
    CHECK(out.table == t);
    CHECK(out.report.empty());
}

TEST_CASE("cami_impute: hand-traced 3x3 example") {
    // Trace with A = B = 1, C = 1, D = 1:
    //  A2  no column or row reaches a 100% missing fraction, nothing dropped.
    //  A3  r(c,a) and r(c,b) are both computed over rows {1,3}: two points,
    //      so both equal exactly 1. r(a,b) = 1 over all rows.
    //  B1  target c (1 missing). |r| ties at 1; ascending name picks K = {a}.
    //  B2  a has no missing values, nothing to mean-fill.
    //  B4  L = {row2}, M = {row1, row3}.
    //  C1  distance from row2 (a=2) to row1 (a=1) is 1, to row3 (a=3) is 1.
    //  C2  tie, the lower row position wins: O = {row1}.
    //  C3  fill c[row2] = mean(c[row1]) = 10.
    const DataTable t(test::ids(3), {col("a", {1.0, 2.0, 3.0}), col("b", {2.0, 4.0, 6.0}), col("c", {10.0, {}, 30.0})});
    const auto out = cami_impute(t, {1.0, 1.0, 1, 1});
    CHECK(out.report.column_neighbors.at("c") == std::vector<std::string>{"a"});
    REQUIRE(out.report.filled.size() == 1);
    const auto& cell = out.report.filled[0];
    CHECK(cell.row == "r2");
    CHECK(cell.column == "c");
    CHECK(cell.neighbors == std::vector<std::string>{"r1"});
    CHECK(cell.value == 10.0);
    CHECK(out.table.at(1, 2) == Cell(10.0));
    CHECK(out.provenance.at(1, 2) == Provenance::Imputed);
    CHECK(out.provenance.at(0, 2) == Provenance::Observed);
}

TEST_CASE("cami_impute: invariants on synthetic data") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto d = synth_generate({60, 6, 0.8, 0.25, seed});
        const CamiParams params{0.6, 0.6, 3, 4};
        const auto out = cami_impute(d.masked, params);
        const auto& x = out.table;
        CHECK(x.missing_count() == 0);

        // Observed cells bit-identical.
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const auto oc = d.masked.column_index(x.column(c).name);
            double lo = INFINITY, hi = -INFINITY;
            for (auto v : d.masked.observed(oc)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            for (std::size_t r = 0; r < x.rows(); ++r) {
                const auto orow = d.masked.row_index(x.row_ids()[r]);
                if (!d.masked.missing(orow, oc)) {
                    CHECK(*x.at(r, c) == *d.masked.at(orow, oc));
                    CHECK(out.provenance.at(r, c) == Provenance::Observed);
                } else {
                    CHECK(*x.at(r, c) >= lo);
                    CHECK(*x.at(r, c) <= hi);
                    CHECK(out.provenance.at(r, c) == Provenance::Imputed);
                }
            }
        }

        // Every filled cell is the mean of its recorded neighbours' observed values.
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& cell : out.report.filled) {
            CHECK(seen.insert({cell.row, cell.column}).second);
            const auto oc = d.masked.column_index(cell.column);
            REQUIRE(d.masked.missing(d.masked.row_index(cell.row), oc));
            REQUIRE(!cell.neighbors.empty());
            double sum = 0.0;
            for (const auto& n : cell.neighbors) {
                const auto& v = d.masked.at(d.masked.row_index(n), oc);
                REQUIRE(v.has_value());
                sum += *v;
            }
            CHECK(cell.value == sum / static_cast<double>(cell.neighbors.size()));
            CHECK(*x.at(x.row_index(cell.row), x.column_index(cell.column)) == cell.value);
        }

        // Deterministic.
        const auto again = cami_impute(d.masked, params);
        CHECK(again.table == out.table);
    }
}

TEST_CASE("cami_impute beats mean imputation on correlated data") {
    double cami_total = 0.0, mean_total = 0.0;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const auto d = synth_generate({300, 6, 0.9, 0.2, seed});
        const auto cami = cami_impute(d.masked, {});
        const auto mean = baseline_impute(d.masked, BaselineMethod::Mean).select_rows([&] {
            std::vector<std::size_t> rows;
            for (const auto& id : cami.table.row_ids()) rows.push_back(d.masked.row_index(id));
            return rows;
        }());
        cami_total += rmse_on_masked(cami.table, d);
        mean_total += rmse_on_masked(mean, d);
    }
    CHECK(cami_total < mean_total);
}

TEST_CASE("cami_impute: fully missing column is dropped, never imputed") {
    // With A = 1 a column needs a 100% missing fraction to go, so every
    // surviving target has at least one observation.
    const DataTable t(test::ids(3), {col("a", {1.0, 2.0, 3.0}), col("b", {Cell{}, Cell{}, Cell{}})});
    const auto out = cami_impute(t, {1.0, 1.0, 1, 1});
    CHECK(out.report.dropped_columns == std::vector<std::string>{"b"});
    CHECK(out.table.cols() == 1);
    CHECK(out.report.filled.empty());
}

TEST_CASE("baseline_impute") {
    const DataTable z(test::ids(2), {col("a", {1.0, {}})});
    CHECK(baseline_impute(z, BaselineMethod::Zero).at(1, 0) == Cell(0.0));

    const DataTable m(test::ids(3), {col("a", {1.0, {}, 3.0})});
    CHECK(baseline_impute(m, BaselineMethod::Mean).at(1, 0) == Cell(2.0));

    const DataTable f(test::ids(4), {col("a", {5.0, 5.0, 7.0, {}})});
    CHECK(baseline_impute(f, BaselineMethod::MostFrequent).at(3, 0) == Cell(5.0));

    const DataTable tie(test::ids(5), {col("a", {9.0, 9.0, 2.0, 2.0, {}})});
    CHECK(baseline_impute(tie, BaselineMethod::MostFrequent).at(4, 0) == Cell(2.0));

    const DataTable empty(test::ids(2), {col("a", {Cell{}, Cell{}})});
    CHECK_ERROR(baseline_impute(empty, BaselineMethod::Mean), ErrorKind::EmptyColumn);
    CHECK_ERROR(baseline_impute(empty, BaselineMethod::MostFrequent), ErrorKind::EmptyColumn);
    CHECK(baseline_impute(empty, BaselineMethod::Zero).at(0, 0) == Cell(0.0));
}
