#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cspace/core/rng.hpp"
#include "cspace/data/synth.hpp"
#include "cspace/predict/linear_ae.hpp"
#include "cspace/predict/loo.hpp"
#include "cspace/predict/metrics.hpp"
#include "cspace/predict/ngboost.hpp"
#include "helpers.hpp"

using namespace cspace;
using cspace::test::col;

namespace {

struct Dataset {
    Matrix x;
    std::vector<double> y;
};

Dataset linear_data(std::size_t n, std::uint64_t seed, double noise = 0.5) {
    Rng rng(seed);
    Dataset d{Matrix(n, 1), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform() * 4.0 - 2.0;
        d.x(i, 0) = x;
        d.y.push_back(2.0 * x + rng.normal(0.0, noise));
    }
    return d;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j - 1);
        i = j;
    }
    return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

double heldout_nll(const ProbModel& m, const Dataset& d, std::size_t stages) {
    double total = 0.0;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        const auto p = predict_ngb(m, d.x.row(i), stages);
        const double z = (d.y[i] - p.mu) / p.sigma;
        total += std::log(p.sigma) + 0.5 * std::log(2.0 * M_PI) + 0.5 * z * z;
    }
    return total / static_cast<double>(d.y.size());
}

// Reference implementations kept independent of src/.
double rsd_ref(double mu, double sigma) { return sigma / std::fabs(mu) * 100.0; }
double mape_ref(const std::vector<double>& x, const std::vector<double>& xh) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs((x[i] - xh[i]) / x[i]);
    return s / static_cast<double>(x.size()) * 100.0;
}

}  // namespace

TEST_CASE("rsd") {
    CHECK(rsd(2.0, 0.1) == 5.0);
    CHECK(rsd(-4.0, 1.0) == 25.0);
    CHECK_ERROR(rsd(0.0, 1.0), ErrorKind::UndefinedRsd);
    CHECK_ERROR(rsd(1.0, -1.0), ErrorKind::Input);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const double mu = rng.normal(0.0, 10.0), sigma = rng.uniform() * 5.0;
        CHECK(std::abs(rsd(mu, sigma) - rsd_ref(mu, sigma)) <= 1e-12 * std::max(1.0, rsd_ref(mu, sigma)));
    }
}

TEST_CASE("mape_reconstruction") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(mape_reconstruction(x, x) == 0.0);
    CHECK(mape_reconstruction(std::vector<double>{100.0}, std::vector<double>{90.0}) == doctest::Approx(10.0));
    CHECK(mape_reconstruction(std::vector<double>{1.0, 2.0}, std::vector<double>{2.0, 1.0}) == 75.0);
    // A zero entry is excluded and n shrinks.
    CHECK(mape_reconstruction(std::vector<double>{0.0, 2.0}, std::vector<double>{5.0, 1.0}) == 50.0);
    CHECK_ERROR(mape_reconstruction(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}),
                ErrorKind::UndefinedMape);
    CHECK_ERROR(mape_reconstruction(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), ErrorKind::Shape);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> a(6), b(6);
        for (auto& v : a) v = rng.normal(0.0, 3.0) + 0.1;
        for (auto& v : b) v = rng.normal(0.0, 3.0);
        const double ref = mape_ref(a, b);
        CHECK(std::abs(mape_reconstruction(a, b) - ref) <= 1e-12 * std::max(1.0, ref));
    }
}

TEST_CASE("booster: constant target is reproduced exactly") {
    const double c = 0.1;
    Matrix x(12, 2);
    for (std::size_t i = 0; i < 12; ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = static_cast<double>(i % 3);
    }
    const std::vector<double> y(12, c);
    const auto model = fit_ngb(x, y, {50, 3, 0.05, 1e-3, 0});
    for (std::size_t i = 0; i < 12; ++i) {
        const auto p = predict_ngb(model, x.row(i));
        CHECK(p.mu == c);
        CHECK(p.sigma == 1e-3);
    }
    const std::vector<double> probe{100.0, -5.0};
    CHECK(predict_ngb(model, probe).mu == c);
}

TEST_CASE("booster: zero stages predicts the marginal MLE") {
    const auto d = linear_data(50, 1);
    const auto model = fit_ngb(d.x, d.y, {0, 3, 0.05, 1e-3, 0});
    double mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / 50.0;
    double var = 0;
    for (double v : d.y) var += (v - mean) * (v - mean);
    const auto p = predict_ngb(model, d.x.row(0));
    CHECK(p.mu == doctest::Approx(mean).epsilon(1e-12));
    CHECK(p.sigma == doctest::Approx(std::sqrt(var / 50.0)).epsilon(1e-12));
}

TEST_CASE("booster: held-out NLL improves on the init-only model") {
    const auto train = linear_data(200, 10);
    const auto test = linear_data(200, 11);
    const auto model = fit_ngb(train.x, train.y, {100, 3, 0.05, 1e-3, 0});
    CHECK(heldout_nll(model, test, 100) < heldout_nll(model, test, 0));
}

TEST_CASE("booster: training NLL never increases") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = synth_generate({60, 4, 0.5, 0.0, seed});
        Matrix x(60, 3);
        std::vector<double> y;
        for (std::size_t r = 0; r < 60; ++r) {
            for (std::size_t c = 0; c < 3; ++c) x(r, c) = *d.truth.at(r, c);
            y.push_back(*d.truth.at(r, 3));
        }
        const auto model = fit_ngb(x, y, {80, 3, 0.1, 1e-3, seed});
        REQUIRE(model.train_nll.size() == 81);
        for (std::size_t s = 1; s < model.train_nll.size(); ++s) CHECK(model.train_nll[s] <= model.train_nll[s - 1]);
    }
}

TEST_CASE("booster: sigma tracks heteroscedastic noise") {
    Rng rng(5);
    Matrix x(400, 1);
    std::vector<double> y;
    for (std::size_t i = 0; i < 400; ++i) {
        const double v = rng.uniform() * 4.0 - 2.0;
        x(i, 0) = v;
        y.push_back(v + rng.normal(0.0, 0.1 + std::abs(v)));
    }
    const auto model = fit_ngb(x, y, {300, 3, 0.05, 1e-3, 0});
    std::vector<double> grid_abs, sigma;
    for (int g = -20; g <= 20; ++g) {
        const double v = g / 10.0;
        const std::vector<double> probe{v};
        grid_abs.push_back(std::abs(v));
        sigma.push_back(predict_ngb(model, probe).sigma);
        CHECK(sigma.back() >= 1e-3);
    }
    CHECK(spearman(grid_abs, sigma) > 0.5);
}

TEST_CASE("booster: prediction at the training median covers the truth") {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto d = linear_data(100, 1000 + seed);
        std::vector<double> xs;
        for (std::size_t i = 0; i < 100; ++i) xs.push_back(d.x(i, 0));
        std::nth_element(xs.begin(), xs.begin() + 50, xs.end());
        const double median = xs[50];
        const auto model = fit_ngb(d.x, d.y, {100, 3, 0.05, 1e-3, seed});
        const std::vector<double> probe{median};
        const auto p = predict_ngb(model, probe);
        if (std::abs(p.mu - 2.0 * median) <= 3.0 * p.sigma) ++covered;
    }
    CHECK(covered >= 38);
}

TEST_CASE("booster: errors") {
    Matrix x(4, 1);
    CHECK_ERROR(fit_ngb(x, std::vector<double>(4, 1.0)), ErrorKind::InsufficientData);
    Matrix nan_x(5, 1);
    nan_x(2, 0) = NAN;
    CHECK_ERROR(fit_ngb(nan_x, std::vector<double>(5, 1.0)), ErrorKind::Input);
    Matrix ok(5, 1);
    const auto model = fit_ngb(ok, std::vector<double>{1, 2, 3, 4, 5}, {5, 2, 0.1, 1e-3, 0});
    CHECK_ERROR(predict_ngb(model, std::vector<double>{1.0, 2.0}), ErrorKind::Shape);
}

TEST_CASE("booster: deterministic") {
    const auto d = linear_data(80, 3);
    CHECK(fit_ngb(d.x, d.y, {40, 3, 0.05, 1e-3, 9}) == fit_ngb(d.x, d.y, {40, 3, 0.05, 1e-3, 9}));
}

TEST_CASE("linear AE: full rank reconstructs the input") {
    Rng rng(1);
    Matrix x(20, 4);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < 4; ++j) x(i, j) = rng.normal(5.0, 1.0);
    }
    const auto ae = fit_linear_ae(x, 4);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto rec = ae.reconstruct(x.row(i));
        CHECK(mape_reconstruction(x.row(i), rec) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("linear AE: rank-one data") {
    const std::vector<double> v{1.0, -2.0, 0.5};
    Matrix x(10, 3);
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = (1.0 + static_cast<double>(i)) * v[j];
    }
    const auto ae = fit_linear_ae(x, 1);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto rec = ae.reconstruct(x.row(i));
        for (std::size_t j = 0; j < 3; ++j) CHECK(rec[j] == doctest::Approx(x(i, j)).epsilon(1e-10));
    }
    CHECK_ERROR(fit_linear_ae(x, 2), ErrorKind::Rank);
    CHECK_ERROR(fit_linear_ae(x, 4), ErrorKind::Rank);
    CHECK_ERROR(fit_linear_ae(x, 0), ErrorKind::Rank);
}

TEST_CASE("linear AE: residual energy equals the discarded eigenvalues") {
    Rng rng(17);
    Matrix x(50, 5);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 5; ++j) x(i, j) = rng.normal(0.0, 1.0 + static_cast<double>(j));
    }
    // Oracle: eigenvalues of the scatter matrix of the centered data.
    Eigen::MatrixXd xc(50, 5);
    for (int j = 0; j < 5; ++j) {
        double m = 0;
        for (int i = 0; i < 50; ++i) m += x(i, j);
        m /= 50.0;
        for (int i = 0; i < 50; ++i) xc(i, j) = x(i, j) - m;
    }
    const Eigen::MatrixXd scatter = xc.transpose() * xc;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
    const auto& ev = eig.eigenvalues();  // ascending
    const double expected = ev(0) + ev(1) + ev(2);

    double previous = INFINITY;
    for (int r = 1; r <= 5; ++r) {
        const auto ae = fit_linear_ae(x, r);
        double err = 0.0;
        for (std::size_t i = 0; i < 50; ++i) {
            const auto rec = ae.reconstruct(x.row(i));
            for (std::size_t j = 0; j < 5; ++j) err += (rec[j] - x(i, j)) * (rec[j] - x(i, j));
        }
        if (r == 2) CHECK(std::abs(err - expected) <= 1e-6);
        CHECK(err <= previous + 1e-9);
        previous = err;

        // Orthonormal basis.
        for (int a = 0; a < r; ++a) {
            for (int b = 0; b < r; ++b) {
                double dot = 0;
                for (std::size_t j = 0; j < 5; ++j) dot += ae.components(j, a) * ae.components(j, b);
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-9);
            }
        }
    }
}

namespace {

class LookupPredictor final : public PointPredictor {
public:
    void fit(const Matrix&, std::span<const double>) override {}
    double predict(std::span<const double> x) const override { return x[0]; }
};

}  // namespace

TEST_CASE("loo_evaluate") {
    // Feature f is a copy of y so the lookup model is a perfect oracle.
    std::vector<Cell> f, y, flat;
    for (int i = 0; i < 12; ++i) {
        f.push_back(1.0 + i);
        y.push_back(1.0 + i);
        flat.push_back(10.0);
    }
    const DataTable t(test::ids(12), {col("f", f), col("y", y), col("flat", flat)});
    const std::vector<ModelSpec> oracle{{"oracle", [] { return std::make_unique<LookupPredictor>(); }}};
    CHECK(loo_evaluate(t, "y", oracle, {5, 3, 1})[0].mape == 0.0);

    const std::vector<ModelSpec> mean{{"mean", [] { return std::make_unique<MeanPredictor>(); }}};
    const DataTable constant(test::ids(4), {col("f", {1.0, 2.0, 3.0, 4.0}), col("y", {10.0, 10.0, 10.0, 10.0})});
    CHECK(loo_evaluate(constant, "y", mean, {5, 3, 1})[0].mape == 0.0);

    const DataTable few(test::ids(3), {col("f", {1.0, 2.0, 3.0}), col("y", {1.0, 2.0, 3.0})});
    CHECK_ERROR(loo_evaluate(few, "y", mean, {5, 3, 1}), ErrorKind::InsufficientData);
    CHECK_ERROR(loo_evaluate(t, "nope", mean, {5, 3, 1}), ErrorKind::Key);

    const auto a = loo_evaluate(t, "flat", mean, {5, 3, 7});
    const auto b = loo_evaluate(t, "flat", mean, {5, 3, 7});
    CHECK(a[0].per_repeat == b[0].per_repeat);
}

TEST_CASE("loo_evaluate: booster beats the mean predictor on correlated data") {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = synth_generate({120, 5, 0.9, 0.0, 500 + seed});
        const std::vector<ModelSpec> models{{"booster", [] { return std::make_unique<BoosterPredictor>(); }},
                                            {"mean", [] { return std::make_unique<MeanPredictor>(); }}};
        const auto res = loo_evaluate(d.truth, "x4", models, {5, 3, seed});
        if (res[0].mape < res[1].mape) ++wins;
    }
    CHECK(wins >= 16);
}
