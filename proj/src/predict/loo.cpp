#include "cspace/predict/loo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cspace/core/error.hpp"
#include "cspace/core/rng.hpp"

namespace cspace {

void MeanPredictor::fit(const Matrix&, std::span<const double> y) {
    if (y.empty()) fail(ErrorKind::InsufficientData, "mean predictor needs data");
    double acc = 0.0;
    for (double v : y) acc += v - y[0];
    mean_ = y[0] + acc / static_cast<double>(y.size());
}

void KnnPredictor::fit(const Matrix& x, std::span<const double> y) {
    if (y.empty()) fail(ErrorKind::InsufficientData, "knn predictor needs data");
    x_ = x;
    y_.assign(y.begin(), y.end());
    mean_.assign(x.cols(), 0.0);
    scale_.assign(x.cols(), 1.0);
    const auto n = static_cast<double>(x.rows());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) sum += x(i, j);
        mean_[j] = sum / n;
        for (std::size_t i = 0; i < x.rows(); ++i) sq += (x(i, j) - mean_[j]) * (x(i, j) - mean_[j]);
        const double sd = std::sqrt(sq / n);
        scale_[j] = sd > 0.0 ? sd : 1.0;
    }
}

double KnnPredictor::predict(std::span<const double> x) const {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x_.cols(); ++j) {
            const double d = (x[j] - x_(i, j)) / scale_[j];
            d2 += d * d;
        }
        dist.emplace_back(d2, i);
    }
    const auto k = std::min<std::size_t>(dist.size(), static_cast<std::size_t>(std::max(k_, 1)));
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += y_[dist[i].second];
    return sum / static_cast<double>(k);
}

std::vector<LooResult> loo_evaluate(const DataTable& table, const std::string& target,
                                    std::span<const ModelSpec> models, const LooOptions& options) {
    const auto t = table.column_index(target);
    if (options.repeats < 1 || options.holdout < 1) fail(ErrorKind::Spec, "repeats and holdout must be >= 1");

    std::vector<std::size_t> labelled;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (!table.missing(r, t)) labelled.push_back(r);
    }
    const auto holdout = static_cast<std::size_t>(options.holdout);
    if (labelled.size() < std::max<std::size_t>(4, holdout + 1)) {
        fail(ErrorKind::InsufficientData, "target '" + target + "' has too few labelled rows");
    }

    std::vector<std::size_t> features;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        if (c != t) features.push_back(c);
    }
    const DataTable rows = table.select_rows(labelled);
    const Matrix x(rows.rows(), features.size(), rows.dense(features));
    std::vector<double> y;
    for (std::size_t r = 0; r < rows.rows(); ++r) y.push_back(*rows.at(r, t));

    std::vector<LooResult> results;
    for (const auto& spec : models) results.push_back(LooResult{spec.name, 0.0, {}});
    std::vector<double> total(models.size(), 0.0);
    std::size_t scored = 0;

    Rng rng(options.seed);
    std::vector<std::size_t> order(y.size());
    for (int rep = 0; rep < options.repeats; ++rep) {
        std::iota(order.begin(), order.end(), 0);
        // Partial Fisher-Yates: the first `holdout` slots are the validation draw.
        for (std::size_t i = 0; i < holdout; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
            std::swap(order[i], order[j]);
        }
        std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(holdout), order.end());
        std::sort(train.begin(), train.end());
        const Matrix x_train = x.select_rows(train);
        std::vector<double> y_train;
        for (auto i : train) y_train.push_back(y[i]);

        for (std::size_t m = 0; m < models.size(); ++m) {
            auto model = models[m].make();
            model->fit(x_train, y_train);
            double rep_sum = 0.0;
            std::size_t rep_n = 0;
            for (std::size_t h = 0; h < holdout; ++h) {
                const auto i = order[h];
                if (y[i] == 0.0) continue;
                rep_sum += std::abs((y[i] - model->predict(x.row(i))) / y[i]) * 100.0;
                ++rep_n;
            }
            total[m] += rep_sum;
            if (m == 0) scored += rep_n;
            results[m].per_repeat.push_back(rep_n ? rep_sum / static_cast<double>(rep_n) : 0.0);
        }
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
        results[m].mape = scored ? total[m] / static_cast<double>(scored) : 0.0;
    }
    return results;
}

}  // namespace cspace
