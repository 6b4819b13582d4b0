#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cspace/data/table.hpp"

namespace cspace {

/// Symmetric matrix of pairwise-complete Pearson coefficients. An entry is
/// undefined when fewer than two rows observe both columns or either column
/// is constant on those rows.
struct CorrelationMatrix {
    std::vector<std::string> attrs;
    std::vector<std::optional<double>> r;  // row-major attrs.size()^2

    std::size_t size() const noexcept { return attrs.size(); }
    const std::optional<double>& at(std::size_t i, std::size_t j) const { return r[i * attrs.size() + j]; }
    std::size_t index(std::string_view attr) const;  // KeyError when absent
};

/// Pearson over the index pairs where both inputs are present.
std::optional<double> pearson_pairwise(std::span<const Cell> a, std::span<const Cell> b);

CorrelationMatrix pairwise_pearson(const DataTable& table);

/// Up to `count` attributes ranked by |r| with `target`, excluding the target
/// itself and undefined entries. Ties go to the smaller name.
std::vector<std::string> top_correlated(const CorrelationMatrix& cm, std::string_view target, int count);

}  // namespace cspace
