#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cspace/core/matrix.hpp"
#include "cspace/predict/tree.hpp"

namespace cspace {

struct NgbParams {
    int stages = 300;
    int depth = 3;
    double learning_rate = 0.05;
    double sigma_floor = 1e-3;
    std::uint64_t seed = 0;
    int min_leaf = 0;  // 0 picks max(3, n / 20)
};

/// One boosting stage: a tree for the mean and one for log sigma. Leaf
/// values already include the stage's line-search scale.
struct NgbStage {
    RegressionTree mu;
    RegressionTree log_sigma;

    friend bool operator==(const NgbStage&, const NgbStage&) = default;
};

/// Gaussian natural-gradient boosting model over (mu, log sigma).
struct ProbModel {
    double mu0 = 0.0;
    double log_sigma0 = 0.0;
    double learning_rate = 0.05;
    double sigma_floor = 1e-3;
    std::size_t n_features = 0;
    std::vector<NgbStage> stages;
    /// Mean training NLL after init and after every stage.
    std::vector<double> train_nll;

    friend bool operator==(const ProbModel&, const ProbModel&) = default;
};

struct ProbPrediction {
    double mu = 0.0;
    double sigma = 0.0;
    std::optional<double> rsd_percent;  // empty when mu == 0
};

/// Mean Gaussian negative log-likelihood with sigma clamped to the floor.
double gaussian_nll(std::span<const double> y, std::span<const double> mu, std::span<const double> log_sigma,
                    double sigma_floor);

/// Fits the booster. Each stage grows one tree per parameter on the
/// Fisher-scaled score of the Gaussian NLL and scales the step by a
/// backtracking line search, so training NLL never increases.
/// InsufficientData for fewer than 5 samples, InputError on non-finite
/// values, ShapeError when |y| != rows(X).
ProbModel fit_ngb(const Matrix& x, std::span<const double> y, const NgbParams& params = {});

/// ShapeError on a dimension mismatch.
ProbPrediction predict_ngb(const ProbModel& model, std::span<const double> x);

/// Same as predict_ngb but stops after `stages` stages.
ProbPrediction predict_ngb(const ProbModel& model, std::span<const double> x, std::size_t stages);

}  // namespace cspace
