#include "cspace/impute/cami.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cspace/core/error.hpp"
#include "cspace/impute/correlation.hpp"

namespace cspace {

void CamiParams::validate() const {
    if (!(max_col_missing > 0.0 && max_col_missing <= 1.0)) fail(ErrorKind::Spec, "A must lie in (0, 1]");
    if (!(max_row_missing > 0.0 && max_row_missing <= 1.0)) fail(ErrorKind::Spec, "B must lie in (0, 1]");
    if (top_columns < 1) fail(ErrorKind::Spec, "C must be >= 1");
    if (top_rows < 1) fail(ErrorKind::Spec, "D must be >= 1");
}

ThresholdResult threshold_filter(const DataTable& table, const CamiParams& params) {
    params.validate();
    if (table.empty()) fail(ErrorKind::EmptyInput, "threshold_filter on an empty table");

    ThresholdResult out;
    std::vector<std::size_t> keep_cols;
    const auto n_rows = static_cast<double>(table.rows());
    for (std::size_t c = 0; c < table.cols(); ++c) {
        const double frac = static_cast<double>(table.missing_count(c)) / n_rows;
        if (frac >= params.max_col_missing) {
            out.dropped_columns.push_back(table.column(c).name);
        } else {
            keep_cols.push_back(c);
        }
    }
    if (keep_cols.empty()) fail(ErrorKind::EmptyResult, "threshold_filter dropped every column");

    std::vector<std::size_t> keep_rows;
    const auto n_cols = static_cast<double>(keep_cols.size());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::size_t missing = 0;
        for (auto c : keep_cols) missing += table.missing(r, c) ? 1 : 0;
        if (static_cast<double>(missing) / n_cols >= params.max_row_missing) {
            out.dropped_rows.push_back(table.row_ids()[r]);
        } else {
            keep_rows.push_back(r);
        }
    }
    if (keep_rows.empty()) fail(ErrorKind::EmptyResult, "threshold_filter dropped every row");

    out.table = table.select_columns(keep_cols).select_rows(keep_rows);
    return out;
}

std::vector<std::size_t> knn_similar_rows(const DataTable& subset, std::size_t query,
                                          std::span<const std::size_t> candidates, int count) {
    if (candidates.empty()) fail(ErrorKind::EmptyCandidates, "no candidate rows for similarity search");
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(candidates.size());
    for (auto cand : candidates) {
        double d2 = 0.0;
        for (const auto& col : subset.columns()) {
            const auto& q = col.values[query];
            const auto& v = col.values[cand];
            if (!q || !v) fail(ErrorKind::Input, "similarity columns must be complete");
            const double d = *q - *v;
            d2 += d * d;
        }
        dist.emplace_back(d2, cand);
    }
    const auto take = std::min<std::size_t>(dist.size(), static_cast<std::size_t>(std::max(count, 0)));
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
    std::vector<std::size_t> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(dist[i].second);
    return out;
}

namespace {

double observed_mean(const Column& col) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : col.values) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) fail(ErrorKind::EmptyColumn, "column '" + col.name + "' has no observed values");
    return sum / static_cast<double>(n);
}

}  // namespace

CamiResult cami_impute(const DataTable& table, const CamiParams& params) {
    auto filtered = threshold_filter(table, params);
    const DataTable& x = filtered.table;

    CamiResult result;
    result.report.dropped_columns = std::move(filtered.dropped_columns);
    result.report.dropped_rows = std::move(filtered.dropped_rows);
    result.provenance = CellProvenance::from_table(x);

    std::vector<std::size_t> targets;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (x.missing_count(c) > 0) targets.push_back(c);
    }
    std::sort(targets.begin(), targets.end(), [&](std::size_t a, std::size_t b) {
        const auto ma = x.missing_count(a), mb = x.missing_count(b);
        if (ma != mb) return ma < mb;
        return x.column(a).name < x.column(b).name;
    });

    std::vector<Column> output = x.columns();
    if (targets.empty()) {
        result.table = x;
        return result;
    }

    CorrelationMatrix cm;
    if (x.cols() >= 2) cm = pairwise_pearson(x);

    for (auto y : targets) {
        const auto& target = x.column(y);
        std::vector<std::string> helper_names;
        if (x.cols() >= 2) helper_names = top_correlated(cm, target.name, params.top_columns);
        result.report.column_neighbors[target.name] = helper_names;

        // Scratch X': helper columns with missing cells replaced by observed means.
        std::vector<std::size_t> helpers;
        std::vector<Column> scratch;
        for (const auto& name : helper_names) {
            const auto k = x.column_index(name);
            helpers.push_back(k);
            Column col = x.column(k);
            const double mean = observed_mean(col);
            for (std::size_t r = 0; r < col.values.size(); ++r) {
                if (!col.values[r]) {
                    col.values[r] = mean;
                    if (!output[k].values[r]) {
                        output[k].values[r] = mean;
                        result.provenance.mark(r, k, Provenance::Imputed);
                    }
                }
            }
            scratch.push_back(std::move(col));
        }
        const DataTable similarity(x.row_ids(), std::move(scratch));

        std::vector<std::size_t> missing_rows, observed_rows;
        for (std::size_t r = 0; r < x.rows(); ++r) (target.values[r] ? observed_rows : missing_rows).push_back(r);
        if (observed_rows.empty()) fail(ErrorKind::Impute, "column '" + target.name + "' has no observed rows");

        for (auto p : missing_rows) {
            // Without helper columns every observed row is equally similar.
            std::vector<std::size_t> neighbors =
                helpers.empty() ? observed_rows : knn_similar_rows(similarity, p, observed_rows, params.top_rows);
            double sum = 0.0;
            FilledCell cell{x.row_ids()[p], target.name, 0.0, {}};
            for (auto n : neighbors) {
                sum += *target.values[n];
                cell.neighbors.push_back(x.row_ids()[n]);
            }
            cell.value = sum / static_cast<double>(neighbors.size());
            output[y].values[p] = cell.value;
            result.provenance.mark(p, y, Provenance::Imputed);
            result.report.filled.push_back(std::move(cell));
        }
    }

    result.table = DataTable(x.row_ids(), std::move(output), x.meta());
    return result;
}

std::string_view to_string(BaselineMethod m) noexcept {
    switch (m) {
        case BaselineMethod::Mean: return "mean";
        case BaselineMethod::Zero: return "zero";
        case BaselineMethod::MostFrequent: return "most-frequent";
    }
    return "?";
}

DataTable baseline_impute(const DataTable& table, BaselineMethod method) {
    auto columns = table.columns();
    for (auto& col : columns) {
        double fill = 0.0;
        if (method == BaselineMethod::Mean) {
            fill = observed_mean(col);
        } else if (method == BaselineMethod::MostFrequent) {
            std::vector<double> values;
            for (const auto& v : col.values) {
                if (v) values.push_back(*v);
            }
            if (values.empty()) fail(ErrorKind::EmptyColumn, "column '" + col.name + "' has no observed values");
            std::sort(values.begin(), values.end());
            std::size_t best_run = 0;
            for (std::size_t i = 0; i < values.size();) {
                std::size_t j = i;
                while (j < values.size() && values[j] == values[i]) ++j;
                // Strict > keeps the smallest value among equally frequent ones.
                if (j - i > best_run) {
                    best_run = j - i;
                    fill = values[i];
                }
                i = j;
            }
        }
        for (auto& v : col.values) {
            if (!v) v = fill;
        }
    }
    return DataTable(table.row_ids(), std::move(columns), table.meta());
}

}  // namespace cspace
