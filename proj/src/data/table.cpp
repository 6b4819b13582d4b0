#include "cspace/data/table.hpp"

#include <algorithm>
#include <set>

#include "cspace/core/error.hpp"

namespace cspace {

DataTable::DataTable(std::vector<std::string> row_ids, std::vector<Column> columns,
                     std::map<std::string, AttrMeta> meta)
    : row_ids_(std::move(row_ids)), columns_(std::move(columns)), meta_(std::move(meta)) {
    std::set<std::string_view> seen;
    for (const auto& id : row_ids_) {
        if (!seen.insert(id).second) fail(ErrorKind::Schema, "duplicate row id '" + id + "'");
    }
    std::set<std::string_view> names;
    for (const auto& col : columns_) {
        if (col.values.size() != row_ids_.size()) {
            fail(ErrorKind::Schema, "column '" + col.name + "' has " + std::to_string(col.values.size()) +
                                        " values, expected " + std::to_string(row_ids_.size()));
        }
        if (!names.insert(col.name).second) fail(ErrorKind::Schema, "duplicate column '" + col.name + "'");
    }
}

std::optional<std::size_t> DataTable::find_column(std::string_view name) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].name == name) return c;
    }
    return std::nullopt;
}

std::optional<std::size_t> DataTable::find_row(std::string_view id) const {
    for (std::size_t r = 0; r < row_ids_.size(); ++r) {
        if (row_ids_[r] == id) return r;
    }
    return std::nullopt;
}

std::size_t DataTable::column_index(std::string_view name) const {
    if (auto c = find_column(name)) return *c;
    fail(ErrorKind::Key, "unknown attribute '" + std::string(name) + "'");
}

std::size_t DataTable::row_index(std::string_view id) const {
    if (auto r = find_row(id)) return *r;
    fail(ErrorKind::Key, "unknown row id '" + std::string(id) + "'");
}

const Column& DataTable::column(std::string_view name) const { return columns_[column_index(name)]; }

std::vector<std::string> DataTable::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

std::size_t DataTable::missing_count(std::size_t col) const {
    const auto& v = columns_.at(col).values;
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const Cell& x) { return !x; }));
}

std::size_t DataTable::missing_count() const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < cols(); ++c) n += missing_count(c);
    return n;
}

AttrKind DataTable::kind(std::string_view name) const {
    auto it = meta_.find(std::string(name));
    return it == meta_.end() ? AttrKind::Observed : it->second.kind;
}

DataTable DataTable::with_values(std::size_t col, std::vector<Cell> values) const {
    auto columns = columns_;
    columns.at(col).values = std::move(values);
    return DataTable(row_ids_, std::move(columns), meta_);
}

DataTable DataTable::select_columns(std::span<const std::size_t> cols) const {
    std::vector<Column> columns;
    std::map<std::string, AttrMeta> meta;
    columns.reserve(cols.size());
    for (auto c : cols) {
        columns.push_back(columns_.at(c));
        if (auto it = meta_.find(columns_[c].name); it != meta_.end()) meta.insert(*it);
    }
    return DataTable(row_ids_, std::move(columns), std::move(meta));
}

DataTable DataTable::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (auto r : rows) ids.push_back(row_ids_.at(r));
    auto columns = columns_;
    for (auto& col : columns) {
        std::vector<Cell> values;
        values.reserve(rows.size());
        for (auto r : rows) values.push_back(col.values[r]);
        col.values = std::move(values);
    }
    return DataTable(std::move(ids), std::move(columns), meta_);
}

DataTable DataTable::drop_column(std::string_view name) const {
    const auto drop = column_index(name);
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < cols(); ++c) {
        if (c != drop) keep.push_back(c);
    }
    return select_columns(keep);
}

std::vector<double> DataTable::dense(std::span<const std::size_t> cols) const {
    std::vector<double> out(rows() * cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto& values = columns_.at(cols[j]).values;
        for (std::size_t r = 0; r < rows(); ++r) {
            if (!values[r]) {
                fail(ErrorKind::Input, "missing cell at row '" + row_ids_[r] + "', column '" + columns_[cols[j]].name + "'");
            }
            out[r * cols.size() + j] = *values[r];
        }
    }
    return out;
}

std::vector<double> DataTable::observed(std::size_t col) const {
    std::vector<double> out;
    for (const auto& v : columns_.at(col).values) {
        if (v) out.push_back(*v);
    }
    return out;
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::Missing: return "missing";
        case Provenance::Observed: return "observed";
        case Provenance::Imputed: return "imputed";
        case Provenance::Predicted: return "predicted";
    }
    return "?";
}

CellProvenance::CellProvenance(std::size_t rows, std::size_t cols, Provenance fill)
    : rows_(rows), cols_(cols), tags_(rows * cols, fill) {}

CellProvenance CellProvenance::from_table(const DataTable& table) {
    CellProvenance out(table.rows(), table.cols(), Provenance::Missing);
    for (std::size_t c = 0; c < table.cols(); ++c) {
        for (std::size_t r = 0; r < table.rows(); ++r) {
            if (!table.missing(r, c)) out.tags_[c * out.rows_ + r] = Provenance::Observed;
        }
    }
    return out;
}

void CellProvenance::mark(std::size_t row, std::size_t col, Provenance p) {
    auto& tag = tags_.at(col * rows_ + row);
    if (tag == Provenance::Observed && p != Provenance::Observed) {
        fail(ErrorKind::Input, "observed cell cannot be retagged");
    }
    tag = p;
}

CellProvenance CellProvenance::select_rows(std::span<const std::size_t> rows) const {
    CellProvenance out(rows.size(), cols_, Provenance::Missing);
    for (std::size_t c = 0; c < cols_; ++c) {
        for (std::size_t i = 0; i < rows.size(); ++i) out.tags_[c * rows.size() + i] = at(rows[i], c);
    }
    return out;
}

CellProvenance CellProvenance::select_columns(std::span<const std::size_t> cols) const {
    CellProvenance out(rows_, cols.size(), Provenance::Missing);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t r = 0; r < rows_; ++r) out.tags_[j * rows_ + r] = at(r, cols[j]);
    }
    return out;
}

MissingStats missing_stats(const DataTable& table) {
    if (table.empty()) fail(ErrorKind::EmptyInput, "missing_stats on an empty table");
    MissingStats stats;
    const auto n_rows = static_cast<double>(table.rows());
    const auto n_cols = static_cast<double>(table.cols());
    std::vector<std::size_t> row_missing(table.rows(), 0);
    for (std::size_t c = 0; c < table.cols(); ++c) {
        std::size_t missing = 0;
        for (std::size_t r = 0; r < table.rows(); ++r) {
            if (table.missing(r, c)) {
                ++missing;
                ++row_missing[r];
            }
        }
        stats.col_fraction[table.column(c).name] = static_cast<double>(missing) / n_rows;
    }
    for (std::size_t r = 0; r < table.rows(); ++r) {
        stats.row_fraction[table.row_ids()[r]] = static_cast<double>(row_missing[r]) / n_cols;
    }
    return stats;
}

DataTable normalize_minmax(const DataTable& table) {
    auto columns = table.columns();
    for (auto& col : columns) {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& v : col.values) {
            if (!v) continue;
            if (!any) {
                lo = hi = *v;
                any = true;
            }
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
        if (!any) fail(ErrorKind::EmptyColumn, "column '" + col.name + "' has no observed values");
        const double span = hi - lo;
        for (auto& v : col.values) {
            if (!v) continue;
            v = span > 0.0 ? (*v - lo) / span : 0.5;
        }
    }
    return DataTable(table.row_ids(), std::move(columns), table.meta());
}

std::string attribute_group(const Column& column) {
    if (!column.group.empty()) return column.group;
    const auto pos = column.name.find('_');
    return pos == std::string::npos ? column.name : column.name.substr(0, pos);
}

}  // namespace cspace
