#include "cspace/impute/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "cspace/core/error.hpp"

namespace cspace {

std::size_t CorrelationMatrix::index(std::string_view attr) const {
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i] == attr) return i;
    }
    fail(ErrorKind::Key, "attribute '" + std::string(attr) + "' not in correlation matrix");
}

std::optional<double> pearson_pairwise(std::span<const Cell> a, std::span<const Cell> b) {
    const std::size_t n = std::min(a.size(), b.size());
    double sum_a = 0.0, sum_b = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] && b[i]) {
            sum_a += *a[i];
            sum_b += *b[i];
            ++count;
        }
    }
    if (count < 2) return std::nullopt;
    const double mean_a = sum_a / static_cast<double>(count);
    const double mean_b = sum_b / static_cast<double>(count);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] && b[i]) {
            const double da = *a[i] - mean_a;
            const double db = *b[i] - mean_b;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

CorrelationMatrix pairwise_pearson(const DataTable& table) {
    if (table.cols() < 2) fail(ErrorKind::EmptyInput, "pairwise_pearson needs at least two columns");
    CorrelationMatrix cm;
    cm.attrs = table.column_names();
    const auto n = table.cols();
    cm.r.assign(n * n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = table.column(i).values;
        // Diagonal is 1 whenever the column could correlate with anything.
        if (pearson_pairwise(a, a)) cm.r[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto r = pearson_pairwise(a, table.column(j).values);
            cm.r[i * n + j] = r;
            cm.r[j * n + i] = r;
        }
    }
    return cm;
}

std::vector<std::string> top_correlated(const CorrelationMatrix& cm, std::string_view target, int count) {
    const auto t = cm.index(target);
    std::vector<std::pair<double, std::string>> ranked;
    for (std::size_t j = 0; j < cm.size(); ++j) {
        if (j == t || !cm.at(t, j)) continue;
        ranked.emplace_back(std::abs(*cm.at(t, j)), cm.attrs[j]);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < count; ++i) out.push_back(ranked[i].second);
    return out;
}

}  // namespace cspace
