#pragma once

#include <string>
#include <string_view>

#include "cspace/data/table.hpp"

namespace cspace {

struct CsvOptions {
    /// Token treated as missing in addition to the empty cell.
    std::string missing_token;
};

/// Parses a UTF-8 CSV with a header row whose first field names the row id
/// column. Double-quoted fields may contain commas and doubled quotes.
///
/// Errors: ragged row -> ParseError(row), duplicate header -> SchemaError,
/// non-numeric non-missing cell -> ParseError(row, column).
DataTable load_csv(std::string_view text, const CsvOptions& options = {});

/// Emits the table with shortest round-trip number formatting. Missing cells
/// are written as `options.missing_token` (empty by default).
std::string write_csv(const DataTable& table, const CsvOptions& options = {},
                      std::string_view id_header = "id");

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace cspace
