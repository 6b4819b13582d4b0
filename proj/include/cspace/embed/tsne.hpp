#pragma once

#include <cstdint>
#include <vector>

#include "cspace/core/matrix.hpp"

namespace cspace {

struct TsneParams {
    double perplexity = 30.0;
    int iters = 1000;
    double learning_rate = 200.0;
    std::uint64_t seed = 0;
};

struct Embedding2D {
    Matrix points;                 // n x 2
    std::vector<double> kl_trace;  // KL(P || Q) at kl_iters
    std::vector<int> kl_iters;
    std::uint64_t seed = 0;
};

inline constexpr int kExaggerationIters = 100;
inline constexpr double kExaggeration = 12.0;

/// Row-stochastic p(j|i) with each row's Gaussian bandwidth chosen so that
/// exp(H(P_i)) (entropy in nats) equals `perplexity`. The diagonal is zero.
Matrix conditional_affinities(const Matrix& x, double perplexity);

/// (P + P^T) / 2n.
Matrix joint_affinities(const Matrix& conditional);

/// Largest usable perplexity for n points, capped at `requested`; 0 when n is
/// too small for an embedding.
double auto_perplexity(std::size_t n, double requested);

/// Exact t-SNE. Requires 2 * perplexity <= n.
Embedding2D tsne_embed(const Matrix& x, const TsneParams& params);

/// Deterministic placement on a small circle for n < 4 points.
Embedding2D trivial_embedding(std::size_t n, std::uint64_t seed);

}  // namespace cspace
