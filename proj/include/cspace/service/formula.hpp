#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cspace {

/// Element counts of a formula such as "LiFe0.5PO4", sorted by symbol with
/// repeated symbols merged. Empty when the text is not a plain formula.
std::optional<std::vector<std::pair<std::string, double>>> parse_formula(std::string_view text);

/// Ids ordered by their sorted element multisets compared
/// lexicographically. Ids that are not formulas follow, by name.
std::vector<std::string> formula_order(std::vector<std::string> ids);

}  // namespace cspace
