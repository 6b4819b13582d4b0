#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cspace {

using Cell = std::optional<double>;

enum class AttrKind { Observed, Target };

struct AttrMeta {
    std::string unit;
    AttrKind kind = AttrKind::Observed;
    friend bool operator==(const AttrMeta&, const AttrMeta&) = default;
};

struct Column {
    std::string name;
    std::string group;
    std::vector<Cell> values;
    friend bool operator==(const Column&, const Column&) = default;
};

/// Column-major table of optional reals keyed by unique row ids.
///
/// Tables are immutable once built; every transformation returns a new
/// table. Missing cells are empty optionals and never collide with 0.0.
class DataTable {
public:
    DataTable() = default;

    /// Throws SchemaError when column lengths disagree with the row count,
    /// row ids repeat, or column names repeat.
    DataTable(std::vector<std::string> row_ids, std::vector<Column> columns,
              std::map<std::string, AttrMeta> meta = {});

    std::size_t rows() const noexcept { return row_ids_.size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return rows() == 0 || cols() == 0; }

    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    const Column& column(std::size_t c) const { return columns_.at(c); }
    const Column& column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
    std::optional<std::size_t> find_row(std::string_view id) const;
    std::size_t column_index(std::string_view name) const;  // KeyError when absent
    std::size_t row_index(std::string_view id) const;       // KeyError when absent
    std::vector<std::string> column_names() const;

    const Cell& at(std::size_t row, std::size_t col) const { return columns_[col].values[row]; }
    bool missing(std::size_t row, std::size_t col) const { return !at(row, col).has_value(); }
    std::size_t missing_count() const;
    std::size_t missing_count(std::size_t col) const;

    const std::map<std::string, AttrMeta>& meta() const noexcept { return meta_; }
    AttrKind kind(std::string_view name) const;

    /// Copy with one column's values replaced.
    DataTable with_values(std::size_t col, std::vector<Cell> values) const;
    DataTable select_columns(std::span<const std::size_t> cols) const;
    DataTable select_rows(std::span<const std::size_t> rows) const;
    DataTable drop_column(std::string_view name) const;

    /// Dense row-major copy of the given columns; throws InputError on a
    /// missing cell.
    std::vector<double> dense(std::span<const std::size_t> cols) const;

    /// Observed values of a column in row order.
    std::vector<double> observed(std::size_t col) const;

    friend bool operator==(const DataTable&, const DataTable&) = default;

private:
    std::vector<std::string> row_ids_;
    std::vector<Column> columns_;
    std::map<std::string, AttrMeta> meta_;
};

enum class Provenance : std::uint8_t { Missing, Observed, Imputed, Predicted };

std::string_view to_string(Provenance p) noexcept;

/// Per-cell source tags, same shape as the table they describe.
class CellProvenance {
public:
    CellProvenance() = default;
    CellProvenance(std::size_t rows, std::size_t cols, Provenance fill);

    /// Observed for present cells, Missing otherwise.
    static CellProvenance from_table(const DataTable& table);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Provenance at(std::size_t row, std::size_t col) const { return tags_[col * rows_ + row]; }

    /// Throws InputError when asked to retag an observed cell.
    void mark(std::size_t row, std::size_t col, Provenance p);

    CellProvenance select_rows(std::span<const std::size_t> rows) const;
    CellProvenance select_columns(std::span<const std::size_t> cols) const;

    friend bool operator==(const CellProvenance&, const CellProvenance&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Provenance> tags_;
};

struct MissingStats {
    std::map<std::string, double> col_fraction;
    std::map<std::string, double> row_fraction;
};

MissingStats missing_stats(const DataTable& table);

/// Per-column min-max scaling of observed values into [0, 1]. Constant
/// columns map to 0.5; missing cells stay missing.
DataTable normalize_minmax(const DataTable& table);

/// Attribute group used for axis grouping: explicit group if set, else the
/// name prefix before the first '_'.
std::string attribute_group(const Column& column);

}  // namespace cspace
