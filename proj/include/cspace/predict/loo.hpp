#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cspace/core/matrix.hpp"
#include "cspace/data/table.hpp"
#include "cspace/predict/ngboost.hpp"

namespace cspace {

/// Point regressor used by the evaluation harness.
class PointPredictor {
public:
    virtual ~PointPredictor() = default;
    virtual void fit(const Matrix& x, std::span<const double> y) = 0;
    virtual double predict(std::span<const double> x) const = 0;
};

class BoosterPredictor final : public PointPredictor {
public:
    explicit BoosterPredictor(NgbParams params = {}) : params_(params) {}
    void fit(const Matrix& x, std::span<const double> y) override { model_ = fit_ngb(x, y, params_); }
    double predict(std::span<const double> x) const override { return predict_ngb(model_, x).mu; }

private:
    NgbParams params_;
    ProbModel model_;
};

class MeanPredictor final : public PointPredictor {
public:
    void fit(const Matrix& x, std::span<const double> y) override;
    double predict(std::span<const double>) const override { return mean_; }

private:
    double mean_ = 0.0;
};

/// k-nearest-neighbour regression on z-scored features.
class KnnPredictor final : public PointPredictor {
public:
    explicit KnnPredictor(int k = 5) : k_(k) {}
    void fit(const Matrix& x, std::span<const double> y) override;
    double predict(std::span<const double> x) const override;

private:
    int k_;
    Matrix x_;
    std::vector<double> y_, mean_, scale_;
};

struct ModelSpec {
    std::string name;
    std::function<std::unique_ptr<PointPredictor>()> make;
};

struct LooOptions {
    int repeats = 5;
    int holdout = 3;
    std::uint64_t seed = 0;
};

struct LooResult {
    std::string model;
    double mape = 0.0;             // percent, over every held-out prediction
    std::vector<double> per_repeat;  // percent
};

/// Repeated hold-out evaluation on the rows where `target` is observed.
/// Every repeat draws `holdout` validation rows (the same draws for every
/// model), fits on the rest and scores the absolute percentage error;
/// all remaining columns are the features and must be complete.
/// InsufficientData with fewer than holdout + 1 labelled rows.
std::vector<LooResult> loo_evaluate(const DataTable& table, const std::string& target,
                                    std::span<const ModelSpec> models, const LooOptions& options);

}  // namespace cspace
