#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cspace/core/matrix.hpp"
#include "cspace/data/table.hpp"

namespace cspace {

inline constexpr std::size_t kMaxShapFeatures = 12;

using ModelFn = std::function<double(std::span<const double>)>;

struct Attribution {
    std::string feature;
    double phi = 0.0;
    int rank = 0;  // 1 = largest |phi|
};

struct ShapleyResult {
    double baseline = 0.0;  // f(background)
    double output = 0.0;    // f(x)
    std::vector<Attribution> attributions;  // in feature order
};

/// Exact Shapley values over all 2^m coalitions. A coalition's value is the
/// model output with the absent features set to `background`.
ShapleyResult shapley_exact(const ModelFn& f, std::span<const double> x, std::span<const double> background,
                            const std::vector<std::string>& features);

enum class Direction { Positive, Negative };

std::string_view to_string(Direction d) noexcept;

struct FeatureScore {
    std::string feature;
    double score = 0.0;  // mean |phi|, or Pearson r
    Direction direction = Direction::Positive;
};

/// Mean |phi| per feature, descending, ties by name. `phi` is compounds x
/// features. With `values` (same shape) the direction is the sign of the
/// correlation between a feature's value and its phi; otherwise, or when
/// that correlation is undefined, the sign of the mean phi.
std::vector<FeatureScore> global_importance(const std::vector<std::string>& features, const Matrix& phi,
                                            const Matrix* values = nullptr);

/// Pearson r of every other attribute against `key_attr`, ranked by |r|.
std::vector<FeatureScore> correlation_importance(const DataTable& table, const std::string& key_attr);

enum class FactorSource { Predicted, Other };

struct Factor {
    std::string name;
    double strength = 0.0;  // normalized |SHAP| in [0,1] or Pearson r
    Direction direction = Direction::Positive;
};

struct InfluenceSet {
    int k = 0;
    std::vector<std::string> keys;
    std::map<std::string, std::vector<Factor>> sectors;
};

struct InfluenceContext {
    const DataTable* table = nullptr;
    std::map<std::string, std::vector<FeatureScore>> shap;  // global importance per predicted key
};

int factors_per_key(std::size_t n_keys);

InfluenceSet influencing_factors(const std::vector<std::string>& keys,
                                 const std::map<std::string, FactorSource>& sources, const InfluenceContext& context);

}  // namespace cspace
