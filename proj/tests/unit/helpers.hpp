#pragma once

#include <doctest.h>

#include <functional>
#include <optional>

#include "cspace/core/error.hpp"
#include "cspace/data/table.hpp"

namespace cspace::test {

inline std::optional<ErrorKind> error_kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

inline Column col(std::string name, std::vector<Cell> values) { return Column{std::move(name), {}, std::move(values)}; }

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "r") {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

}  // namespace cspace::test

#define CHECK_ERROR(expr, expected_kind) \
    CHECK(::cspace::test::error_kind_of([&] { (void)(expr); }) == std::optional<::cspace::ErrorKind>(expected_kind))
