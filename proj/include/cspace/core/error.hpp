#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cspace {

/// Failure categories shared by every module. The service maps them to HTTP
/// status codes and the CLI maps them to exit codes.
enum class ErrorKind {
    Parse,
    Schema,
    EmptyInput,
    EmptyColumn,
    EmptyResult,
    EmptyCandidates,
    Spec,
    Key,
    Impute,
    Input,
    Shape,
    UndefinedRsd,
    UndefinedMape,
    Rank,
    InsufficientData,
    TooManyFeatures,
    UndefinedCorrelation,
    TooManyKeyAttrs,
    Perplexity,
    Geometry,
    Assignment,
    Internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failure that remembers where it happened (row is 1-based over data
/// rows, column is 0-based; -1 when not applicable).
class ParseError : public Error {
public:
    ParseError(const std::string& what, long row, long column = -1)
        : Error(ErrorKind::Parse, what), row_(row), column_(column) {}

    long row() const noexcept { return row_; }
    long column() const noexcept { return column_; }

private:
    long row_;
    long column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cspace
