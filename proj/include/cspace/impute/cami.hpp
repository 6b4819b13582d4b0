#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cspace/data/table.hpp"

namespace cspace {

/// Thresholds for correlation-aware multivariate imputation.
///
/// max_col_missing and max_row_missing are fractions: a column (row) whose
/// missing fraction reaches the threshold is dropped. top_columns is how
/// many correlated helper columns drive the similarity search and
/// top_rows how many similar rows are averaged.
struct CamiParams {
    double max_col_missing = 0.6;
    double max_row_missing = 0.6;
    int top_columns = 5;
    int top_rows = 5;

    void validate() const;  // SpecError on out-of-range values
};

struct FilledCell {
    std::string row;
    std::string column;
    double value = 0.0;
    std::vector<std::string> neighbors;
};

struct ImputationReport {
    std::vector<std::string> dropped_columns;
    std::vector<std::string> dropped_rows;
    std::vector<FilledCell> filled;
    std::map<std::string, std::vector<std::string>> column_neighbors;

    bool empty() const noexcept { return dropped_columns.empty() && dropped_rows.empty() && filled.empty(); }
};

struct ThresholdResult {
    DataTable table;
    std::vector<std::string> dropped_columns;
    std::vector<std::string> dropped_rows;
};

/// Drops columns with missing fraction >= max_col_missing, then rows whose
/// missing fraction over the surviving columns is >= max_row_missing.
/// EmptyResult when every column or every row goes.
ThresholdResult threshold_filter(const DataTable& table, const CamiParams& params);

/// Up to `count` candidate row indices nearest to `query` by Euclidean
/// distance over all columns of `subset` (which must be complete). Ties go
/// to the lower row position. EmptyCandidates when `candidates` is empty.
std::vector<std::size_t> knn_similar_rows(const DataTable& subset, std::size_t query,
                                          std::span<const std::size_t> candidates, int count);

struct CamiResult {
    DataTable table;
    CellProvenance provenance;
    ImputationReport report;
};

/// Correlation-aware multivariate imputation.
///
/// After threshold filtering, every column with missing cells is a target,
/// visited in ascending missing-count order (name breaks ties). For each
/// target the top correlated helper columns are mean-filled inside a
/// scratch copy, and each missing target cell receives the mean target value
/// of its most similar rows among those observing the target. Similarity
/// always uses observed values plus helper means, never earlier fills.
CamiResult cami_impute(const DataTable& table, const CamiParams& params);

enum class BaselineMethod { Mean, Zero, MostFrequent };

std::string_view to_string(BaselineMethod m) noexcept;

/// Fills every missing cell with a per-column statistic. MostFrequent takes
/// the modal observed value, smallest value on ties. EmptyColumn for Mean
/// and MostFrequent on a column without observations.
DataTable baseline_impute(const DataTable& table, BaselineMethod method);

}  // namespace cspace
