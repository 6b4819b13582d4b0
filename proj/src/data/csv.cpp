#include "cspace/data/csv.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cspace/core/error.hpp"

namespace cspace {
namespace {

// Splits one logical record starting at `pos`; advances `pos` past the line
// terminator. Quoted fields may span commas but not newlines.
std::vector<std::string> split_record(std::string_view text, std::size_t& pos, long row) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (pos < text.size()) {
        const char ch = text[pos];
        if (quoted) {
            if (ch == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
            ++pos;
            continue;
        }
        if (ch == '"' && field.empty() && !was_quoted) {
            quoted = was_quoted = true;
            ++pos;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
            ++pos;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            break;
        } else {
            field.push_back(ch);
            ++pos;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", row);
    fields.push_back(std::move(field));
    return fields;
}

bool blank_line(std::string_view text, std::size_t pos) {
    return pos < text.size() && (text[pos] == '\n' || text[pos] == '\r');
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace

DataTable load_csv(std::string_view text, const CsvOptions& options) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::size_t pos = 0;
    if (text.empty()) throw ParseError("missing header row", 0);
    const auto header = split_record(text, pos, 0);
    if (header.size() < 1) throw ParseError("empty header", 0);

    std::set<std::string> names;
    std::vector<Column> columns;
    for (std::size_t i = 1; i < header.size(); ++i) {
        std::string name(trim(header[i]));
        if (!names.insert(name).second) fail(ErrorKind::Schema, "duplicate header name '" + name + "'");
        columns.push_back(Column{std::move(name), {}, {}});
    }

    std::vector<std::string> ids;
    long row = 0;
    while (pos < text.size()) {
        if (blank_line(text, pos)) {
            ++pos;
            continue;
        }
        ++row;
        auto fields = split_record(text, pos, row);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                 " fields, header has " + std::to_string(header.size()),
                             row);
        }
        ids.emplace_back(trim(fields[0]));
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const auto cell = trim(fields[c]);
            auto& values = columns[c - 1].values;
            if (cell.empty() || cell == options.missing_token) {
                values.emplace_back(std::nullopt);
                continue;
            }
            double v = 0.0;
            const auto* first = cell.data();
            const auto* last = cell.data() + cell.size();
            if (*first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last) {
                throw ParseError("row " + std::to_string(row) + ", column '" + columns[c - 1].name +
                                     "': not a number: '" + std::string(cell) + "'",
                                 row, static_cast<long>(c));
            }
            values.emplace_back(v);
        }
    }
    return DataTable(std::move(ids), std::move(columns));
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string write_csv(const DataTable& table, const CsvOptions& options, std::string_view id_header) {
    std::ostringstream out;
    out << quote_if_needed(std::string(id_header));
    for (const auto& col : table.columns()) out << ',' << quote_if_needed(col.name);
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << quote_if_needed(table.row_ids()[r]);
        for (std::size_t c = 0; c < table.cols(); ++c) {
            out << ',';
            const auto& v = table.at(r, c);
            out << (v ? format_double(*v) : options.missing_token);
        }
        out << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Input, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Input, "cannot write '" + path + "'");
    out << contents;
}

}  // namespace cspace
