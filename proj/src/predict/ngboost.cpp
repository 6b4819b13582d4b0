#include "cspace/predict/ngboost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cspace/core/error.hpp"
#include "cspace/predict/metrics.hpp"

namespace cspace {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double clamped_sigma(double log_sigma, double floor) { return std::max(std::exp(log_sigma), floor); }

// Mean that is exact for constant input.
double stable_mean(std::span<const double> y) {
    double acc = 0.0;
    for (double v : y) acc += v - y[0];
    return y[0] + acc / static_cast<double>(y.size());
}

double trial_nll(std::span<const double> y, std::span<const double> mu, std::span<const double> ls,
                 std::span<const double> d_mu, std::span<const double> d_ls, double step, double floor) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = mu[i] + step * d_mu[i];
        const double s = clamped_sigma(ls[i] + step * d_ls[i], floor);
        const double z = (y[i] - m) / s;
        total += std::log(s) + kHalfLog2Pi + 0.5 * z * z;
    }
    return total / static_cast<double>(y.size());
}

}  // namespace

double gaussian_nll(std::span<const double> y, std::span<const double> mu, std::span<const double> log_sigma,
                    double sigma_floor) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double s = clamped_sigma(log_sigma[i], sigma_floor);
        const double z = (y[i] - mu[i]) / s;
        total += std::log(s) + kHalfLog2Pi + 0.5 * z * z;
    }
    return total / static_cast<double>(y.size());
}

ProbModel fit_ngb(const Matrix& x, std::span<const double> y, const NgbParams& params) {
    if (y.size() != x.rows()) fail(ErrorKind::Shape, "X rows and y length differ");
    if (y.size() < 5) fail(ErrorKind::InsufficientData, "booster needs at least 5 samples");
    if (!(params.sigma_floor > 0.0)) fail(ErrorKind::Spec, "sigmaFloor must be positive");
    if (params.stages < 0 || params.depth < 1 || params.min_leaf < 0 || !(params.learning_rate > 0.0)) {
        fail(ErrorKind::Spec, "invalid booster parameters");
    }
    for (double v : x.data()) {
        if (!std::isfinite(v)) fail(ErrorKind::Input, "non-finite feature value");
    }
    for (double v : y) {
        if (!std::isfinite(v)) fail(ErrorKind::Input, "non-finite target value");
    }

    const std::size_t n = y.size();
    ProbModel model;
    model.learning_rate = params.learning_rate;
    model.sigma_floor = params.sigma_floor;
    model.n_features = x.cols();
    model.mu0 = stable_mean(y);
    double var = 0.0;
    for (double v : y) var += (v - model.mu0) * (v - model.mu0);
    model.log_sigma0 = std::log(std::max(std::sqrt(var / static_cast<double>(n)), params.sigma_floor));

    std::vector<double> mu(n, model.mu0), ls(n, model.log_sigma0);
    std::vector<double> g_mu(n), g_ls(n), d_mu(n), d_ls(n);
    double loss = gaussian_nll(y, mu, ls, params.sigma_floor);
    model.train_nll.push_back(loss);

    const SortedFeatures sorted(x);
    const int auto_leaf = std::max<int>(3, static_cast<int>(n / 20));
    const TreeParams tree_params{params.depth, params.min_leaf > 0 ? params.min_leaf : auto_leaf};
    const double lr = params.learning_rate;

    for (int stage = 0; stage < params.stages; ++stage) {
        // Natural gradient of the NLL under Fisher diag(1/sigma^2, 2), negated.
        for (std::size_t i = 0; i < n; ++i) {
            const double s = clamped_sigma(ls[i], params.sigma_floor);
            const double r = y[i] - mu[i];
            g_mu[i] = r;
            g_ls[i] = std::exp(ls[i]) > params.sigma_floor ? 0.5 * (r * r / (s * s) - 1.0) : 0.0;
        }
        NgbStage step{fit_tree(x, sorted, g_mu, tree_params), fit_tree(x, sorted, g_ls, tree_params)};
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            d_mu[i] = step.mu.predict(row);
            d_ls[i] = step.log_sigma.predict(row);
        }

        // Scale search on the full step: grow while it keeps improving, then
        // shrink until it improves on the current loss.
        double scale = 1.0;
        while (scale <= 256.0) {
            const double trial = trial_nll(y, mu, ls, d_mu, d_ls, scale, params.sigma_floor);
            if (!std::isfinite(trial) || trial > loss) break;
            scale *= 2.0;
        }
        while (scale >= 1e-5) {
            const double trial = trial_nll(y, mu, ls, d_mu, d_ls, scale, params.sigma_floor);
            if (std::isfinite(trial) && trial < loss) break;
            scale *= 0.5;
        }
        // The applied step is lr * scale; back off further if that step
        // alone would raise the loss.
        double next = trial_nll(y, mu, ls, d_mu, d_ls, lr * scale, params.sigma_floor);
        while (!(next <= loss) && scale > 1e-8) {
            scale *= 0.5;
            next = trial_nll(y, mu, ls, d_mu, d_ls, lr * scale, params.sigma_floor);
        }
        if (!(next <= loss)) {
            scale = 0.0;
            next = loss;
        }

        step.mu.scale(scale);
        step.log_sigma.scale(scale);
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] += lr * scale * d_mu[i];
            ls[i] += lr * scale * d_ls[i];
        }
        loss = gaussian_nll(y, mu, ls, params.sigma_floor);
        if (loss > model.train_nll.back()) {
            // Re-evaluation differs from the trial only by rounding order.
            fail(ErrorKind::Internal, "training NLL increased at stage " + std::to_string(stage));
        }
        model.train_nll.push_back(loss);
        model.stages.push_back(std::move(step));
    }
    return model;
}

ProbPrediction predict_ngb(const ProbModel& model, std::span<const double> x, std::size_t stages) {
    if (x.size() != model.n_features) fail(ErrorKind::Shape, "feature vector has wrong dimension");
    double mu = model.mu0;
    double ls = model.log_sigma0;
    const auto used = std::min(stages, model.stages.size());
    for (std::size_t s = 0; s < used; ++s) {
        mu += model.learning_rate * model.stages[s].mu.predict(x);
        ls += model.learning_rate * model.stages[s].log_sigma.predict(x);
    }
    ProbPrediction out{mu, clamped_sigma(ls, model.sigma_floor), std::nullopt};
    if (mu != 0.0) out.rsd_percent = rsd(mu, out.sigma);
    return out;
}

ProbPrediction predict_ngb(const ProbModel& model, std::span<const double> x) {
    return predict_ngb(model, x, model.stages.size());
}

}  // namespace cspace
