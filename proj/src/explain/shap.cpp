#include "cspace/explain/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cspace/core/error.hpp"
#include "cspace/impute/correlation.hpp"

namespace cspace {
namespace {

void rank_by_magnitude(std::vector<FeatureScore>& scores) {
    std::stable_sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
        const double ma = std::abs(a.score), mb = std::abs(b.score);
        if (ma != mb) return ma > mb;
        return a.feature < b.feature;
    });
}

Direction sign_of(double v) { return v < 0.0 ? Direction::Negative : Direction::Positive; }

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::Negative ? "negative" : "positive"; }

ShapleyResult shapley_exact(const ModelFn& f, std::span<const double> x, std::span<const double> background,
                            const std::vector<std::string>& features) {
    const std::size_t m = features.size();
    if (m > kMaxShapFeatures) fail(ErrorKind::TooManyFeatures, "exact Shapley is limited to 12 features");
    if (x.size() != m || background.size() != m) fail(ErrorKind::Shape, "x, background and features differ in size");

    const std::size_t coalitions = std::size_t{1} << m;
    std::vector<double> value(coalitions);
    std::vector<double> probe(m);
    for (std::size_t mask = 0; mask < coalitions; ++mask) {
        for (std::size_t j = 0; j < m; ++j) probe[j] = (mask >> j) & 1U ? x[j] : background[j];
        value[mask] = f(probe);
    }

    // weight[s] = s! (m - s - 1)! / m!
    std::vector<double> weight(m, 0.0);
    for (std::size_t s = 0; s < m; ++s) {
        double w = 1.0 / static_cast<double>(m);
        for (std::size_t t = 1; t <= s; ++t) w *= static_cast<double>(t) / static_cast<double>(m - t);
        weight[s] = w;
    }

    ShapleyResult out;
    out.baseline = value[0];
    out.output = value[coalitions - 1];
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        double phi = 0.0;
        for (std::size_t mask = 0; mask < coalitions; ++mask) {
            if (mask & bit) continue;
            phi += weight[static_cast<std::size_t>(std::popcount(mask))] * (value[mask | bit] - value[mask]);
        }
        out.attributions.push_back({features[j], phi, 0});
    }

    std::vector<std::size_t> order(m);
    for (std::size_t j = 0; j < m; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double pa = std::abs(out.attributions[a].phi), pb = std::abs(out.attributions[b].phi);
        if (pa != pb) return pa > pb;
        return features[a] < features[b];
    });
    for (std::size_t r = 0; r < m; ++r) out.attributions[order[r]].rank = static_cast<int>(r + 1);
    return out;
}

std::vector<FeatureScore> global_importance(const std::vector<std::string>& features, const Matrix& phi,
                                            const Matrix* values) {
    if (phi.rows() == 0) fail(ErrorKind::EmptyInput, "no attributions");
    if (phi.cols() != features.size()) fail(ErrorKind::Shape, "phi columns and features differ");
    if (values && (values->rows() != phi.rows() || values->cols() != phi.cols())) {
        fail(ErrorKind::Shape, "values and phi differ in shape");
    }
    const auto n = static_cast<double>(phi.rows());
    std::vector<FeatureScore> scores;
    for (std::size_t j = 0; j < phi.cols(); ++j) {
        double abs_sum = 0.0, sum = 0.0;
        std::vector<Cell> pv, xv;
        for (std::size_t i = 0; i < phi.rows(); ++i) {
            abs_sum += std::abs(phi(i, j));
            sum += phi(i, j);
            if (values) {
                pv.emplace_back(phi(i, j));
                xv.emplace_back((*values)(i, j));
            }
        }
        Direction dir = sign_of(sum);
        if (values) {
            if (const auto r = pearson_pairwise(xv, pv)) dir = sign_of(*r);
        }
        scores.push_back({features[j], abs_sum / n, dir});
    }
    rank_by_magnitude(scores);
    return scores;
}

std::vector<FeatureScore> correlation_importance(const DataTable& table, const std::string& key_attr) {
    const auto k = table.column_index(key_attr);
    const auto& key = table.column(k).values;
    std::vector<FeatureScore> scores;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        if (c == k) continue;
        const auto r = pearson_pairwise(key, table.column(c).values);
        if (!r) continue;
        scores.push_back({table.column(c).name, *r, sign_of(*r)});
    }

    std::optional<double> first;
    bool constant = true;
    for (const auto& v : key) {
        if (!v) continue;
        if (!first) first = v;
        else if (*v != *first) constant = false;
    }
    if (constant) fail(ErrorKind::UndefinedCorrelation, "key attribute '" + key_attr + "' is constant");
    rank_by_magnitude(scores);
    return scores;
}

int factors_per_key(std::size_t n_keys) {
    if (n_keys == 0) fail(ErrorKind::Spec, "at least one key attribute is required");
    if (n_keys > 15) fail(ErrorKind::TooManyKeyAttrs, "at most 15 key attributes are supported");
    return static_cast<int>(15 / n_keys);
}

InfluenceSet influencing_factors(const std::vector<std::string>& keys,
                                 const std::map<std::string, FactorSource>& sources, const InfluenceContext& context) {
    InfluenceSet out;
    out.k = factors_per_key(keys.size());
    out.keys = keys;
    for (const auto& key : keys) {
        const auto src = sources.find(key);
        const bool predicted = src != sources.end() && src->second == FactorSource::Predicted;
        std::vector<Factor> factors;
        if (predicted) {
            const auto it = context.shap.find(key);
            if (it == context.shap.end()) fail(ErrorKind::Key, "no attributions for predicted key '" + key + "'");
            double top = 0.0;
            for (const auto& s : it->second) top = std::max(top, std::abs(s.score));
            for (const auto& s : it->second) {
                if (s.feature == key) continue;
                factors.push_back({s.feature, top > 0.0 ? std::abs(s.score) / top : 0.0, s.direction});
            }
        } else {
            if (!context.table) fail(ErrorKind::Input, "a table is needed for correlation factors");
            for (const auto& s : correlation_importance(*context.table, key)) {
                factors.push_back({s.feature, s.score, s.direction});
            }
        }
        std::stable_sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) {
            const double ma = std::abs(a.strength), mb = std::abs(b.strength);
            if (ma != mb) return ma > mb;
            return a.name < b.name;
        });
        if (factors.size() > static_cast<std::size_t>(out.k)) factors.resize(static_cast<std::size_t>(out.k));
        out.sectors[key] = std::move(factors);
    }
    return out;
}

}  // namespace cspace
