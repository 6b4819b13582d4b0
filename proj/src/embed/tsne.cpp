#include "cspace/embed/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cspace/core/error.hpp"
#include "cspace/core/rng.hpp"

namespace cspace {
namespace {

Matrix squared_distances(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                const double diff = x(i, c) - x(j, c);
                s += diff * diff;
            }
            d(i, j) = s;
            d(j, i) = s;
        }
    }
    return d;
}

// Fills row i of p for precision beta and returns the entropy in nats.
double gaussian_row(const Matrix& d2, std::size_t i, double beta, Matrix& p) {
    const std::size_t n = d2.rows();
    double min_d = INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) min_d = std::min(min_d, d2(i, j));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        p(i, j) = j == i ? 0.0 : std::exp(-beta * (d2(i, j) - min_d));
        sum += p(i, j);
    }
    double h = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        p(i, j) /= sum;
        if (p(i, j) > 0.0) h -= p(i, j) * std::log(p(i, j));
    }
    return h;
}

double kl_divergence(const Matrix& p, const Matrix& y) {
    const std::size_t n = p.rows();
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
            z += 1.0 / (1.0 + dx * dx + dy * dy);
        }
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
            const double q = std::max(1.0 / (1.0 + dx * dx + dy * dy) / z, 1e-300);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return std::max(kl, 0.0);
}

}  // namespace

Matrix conditional_affinities(const Matrix& x, double perplexity) {
    const std::size_t n = x.rows();
    if (n < 2) fail(ErrorKind::Perplexity, "t-SNE needs at least two points");
    if (!(perplexity > 0.0) || perplexity > static_cast<double>(n - 1)) {
        fail(ErrorKind::Perplexity, "perplexity must lie in (0, n-1]");
    }
    const Matrix d2 = squared_distances(x);
    const double target = std::log(perplexity);
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        // Bisection on log(beta); entropy falls as beta grows.
        double lo = -50.0, hi = 50.0, log_beta = 0.0;
        double h = gaussian_row(d2, i, 1.0, p);
        for (int it = 0; it < 200 && std::abs(h - target) > 1e-12; ++it) {
            if (h > target) lo = log_beta;
            else hi = log_beta;
            log_beta = 0.5 * (lo + hi);
            h = gaussian_row(d2, i, std::exp(log_beta), p);
        }
    }
    return p;
}

Matrix joint_affinities(const Matrix& conditional) {
    const std::size_t n = conditional.rows();
    Matrix p(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) p(i, j) = (conditional(i, j) + conditional(j, i)) * scale;
    }
    return p;
}

double auto_perplexity(std::size_t n, double requested) {
    if (n < 4) return 0.0;
    return std::min(requested, std::floor(static_cast<double>(n - 1) / 3.0));
}

Embedding2D trivial_embedding(std::size_t n, std::uint64_t seed) {
    Embedding2D out{Matrix(n, 2), {}, {}, seed};
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n, 1));
        out.points(i, 0) = n > 1 ? std::cos(a) : 0.0;
        out.points(i, 1) = n > 1 ? std::sin(a) : 0.0;
    }
    return out;
}

Embedding2D tsne_embed(const Matrix& x, const TsneParams& params) {
    const std::size_t n = x.rows();
    for (double v : x.data()) {
        if (!std::isfinite(v)) fail(ErrorKind::Input, "t-SNE input must be complete and finite");
    }
    if (n < 2 || 2.0 * params.perplexity > static_cast<double>(n)) {
        fail(ErrorKind::Perplexity, "perplexity too large for " + std::to_string(n) + " points");
    }
    if (params.iters < 1 || !(params.learning_rate > 0.0)) fail(ErrorKind::Spec, "invalid t-SNE parameters");

    const Matrix p = joint_affinities(conditional_affinities(x, params.perplexity));

    Rng rng(params.seed);
    Embedding2D out{Matrix(n, 2), {}, {}, params.seed};
    Matrix& y = out.points;
    for (std::size_t i = 0; i < n; ++i) {
        y(i, 0) = rng.normal(0.0, 1e-4);
        y(i, 1) = rng.normal(0.0, 1e-4);
    }
    Matrix update(n, 2), gains(n, 2, 1.0), grad(n, 2);
    std::vector<double> num(n * n);

    for (int iter = 0; iter < params.iters; ++iter) {
        const double exaggeration = iter < kExaggerationIters ? kExaggeration : 1.0;
        const double momentum = iter < 250 ? 0.5 : 0.8;

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num[i * n + i] = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
                const double w = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = w;
                num[j * n + i] = w;
                z += 2.0 * w;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            double gx = 0.0, gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double w = num[i * n + j];
                const double m = (exaggeration * p(i, j) - w / z) * w;
                gx += m * (y(i, 0) - y(j, 0));
                gy += m * (y(i, 1) - y(j, 1));
            }
            grad(i, 0) = 4.0 * gx;
            grad(i, 1) = 4.0 * gy;
        }

        double mean_x = 0.0, mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 2; ++c) {
                const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
                gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, 0.01) : gains(i, c) + 0.2;
                update(i, c) = momentum * update(i, c) - params.learning_rate * gains(i, c) * grad(i, c);
                y(i, c) += update(i, c);
            }
            mean_x += y(i, 0);
            mean_y += y(i, 1);
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) -= mean_x;
            y(i, 1) -= mean_y;
        }

        const int done = iter + 1;
        if (done % 50 == 0 || done == kExaggerationIters || done == params.iters) {
            out.kl_iters.push_back(done);
            out.kl_trace.push_back(kl_divergence(p, y));
        }
    }
    return out;
}

}  // namespace cspace
