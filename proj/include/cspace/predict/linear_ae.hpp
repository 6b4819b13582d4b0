#pragma once

#include <span>
#include <vector>

#include "cspace/core/matrix.hpp"

namespace cspace {

/// Linear autoencoder: encoding projects centered input onto an orthonormal
/// rank-r basis, decoding maps back. Equivalent to the principal subspace of
/// the training data.
struct AEModel {
    std::vector<double> column_means;
    Matrix components;  // cols x r, orthonormal columns
    int rank = 0;

    std::vector<double> encode(std::span<const double> x) const;
    std::vector<double> decode(std::span<const double> code) const;
    std::vector<double> reconstruct(std::span<const double> x) const;
};

/// RankError when r < 1, r > min(rows, cols) or r exceeds the numerical
/// rank of the centered data.
AEModel fit_linear_ae(const Matrix& x, int r);

}  // namespace cspace
