#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cspace/core/matrix.hpp"

namespace cspace {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Least-squares regression tree. Samples with x[feature] <= threshold go
/// left.
class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict(std::span<const double> x) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    void scale(double factor);

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
};

/// Per-feature sample orderings shared by every tree grown on the same X.
class SortedFeatures {
public:
    explicit SortedFeatures(const Matrix& x);
    const std::vector<std::uint32_t>& order(std::size_t feature) const { return order_[feature]; }

private:
    std::vector<std::vector<std::uint32_t>> order_;
};

struct TreeParams {
    int max_depth = 3;
    int min_leaf = 1;
};

RegressionTree fit_tree(const Matrix& x, const SortedFeatures& sorted, std::span<const double> target,
                        const TreeParams& params);

}  // namespace cspace
