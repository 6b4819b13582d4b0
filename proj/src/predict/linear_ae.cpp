#include "cspace/predict/linear_ae.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "cspace/core/error.hpp"

namespace cspace {

AEModel fit_linear_ae(const Matrix& x, int r) {
    const auto rows = static_cast<Eigen::Index>(x.rows());
    const auto cols = static_cast<Eigen::Index>(x.cols());
    if (r < 1 || r > std::min(rows, cols)) fail(ErrorKind::Rank, "rank must lie in [1, min(rows, cols)]");

    AEModel model;
    model.rank = r;
    model.column_means.assign(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) model.column_means[j] += x(i, j);
    }
    for (auto& m : model.column_means) m /= static_cast<double>(x.rows());

    Eigen::MatrixXd centered(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            centered(i, j) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
                             model.column_means[static_cast<std::size_t>(j)];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = std::max<double>(static_cast<double>(std::max(rows, cols)) * sv(0) * 1e-12, 1e-300);
    Eigen::Index numerical_rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) numerical_rank += sv(k) > tol ? 1 : 0;
    if (r > numerical_rank) {
        fail(ErrorKind::Rank, "rank " + std::to_string(r) + " exceeds data rank " + std::to_string(numerical_rank));
    }

    model.components = Matrix(x.cols(), static_cast<std::size_t>(r));
    const auto& v = svd.matrixV();
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index k = 0; k < r; ++k) {
            model.components(static_cast<std::size_t>(j), static_cast<std::size_t>(k)) = v(j, k);
        }
    }
    return model;
}

std::vector<double> AEModel::encode(std::span<const double> x) const {
    std::vector<double> code(static_cast<std::size_t>(rank), 0.0);
    for (std::size_t j = 0; j < column_means.size(); ++j) {
        const double d = x[j] - column_means[j];
        for (std::size_t k = 0; k < code.size(); ++k) code[k] += components(j, k) * d;
    }
    return code;
}

std::vector<double> AEModel::decode(std::span<const double> code) const {
    std::vector<double> out = column_means;
    for (std::size_t j = 0; j < out.size(); ++j) {
        for (std::size_t k = 0; k < code.size(); ++k) out[j] += components(j, k) * code[k];
    }
    return out;
}

std::vector<double> AEModel::reconstruct(std::span<const double> x) const {
    if (x.size() != column_means.size()) fail(ErrorKind::Shape, "input has wrong dimension");
    return decode(encode(x));
}

}  // namespace cspace
