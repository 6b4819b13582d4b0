#include "cspace/predict/tree.hpp"

#include <algorithm>
#include <numeric>

namespace cspace {

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes_.empty()) return 0.0;
    int i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& node = nodes_[i];
        i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[i].value;
}

void RegressionTree::scale(double factor) {
    for (auto& node : nodes_) {
        if (node.feature < 0) node.value *= factor;
    }
}

SortedFeatures::SortedFeatures(const Matrix& x) : order_(x.cols()) {
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto& order = order_[f];
        order.resize(x.rows());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }
}

namespace {

struct Pending {
    int node;
    int depth;
};

}  // namespace

RegressionTree fit_tree(const Matrix& x, const SortedFeatures& sorted, std::span<const double> target,
                        const TreeParams& params) {
    const std::size_t n = x.rows();
    const auto min_leaf = static_cast<std::size_t>(std::max(params.min_leaf, 1));
    std::vector<int> node_of(n, 0);
    std::vector<TreeNode> nodes(1);
    std::vector<Pending> stack{{0, 0}};
    std::vector<std::uint32_t> members;

    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();

        double sum = 0.0, sum_sq = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (node_of[i] == id) {
                sum += target[i];
                sum_sq += target[i] * target[i];
                ++count;
            }
        }
        nodes[id].value = count > 0 ? sum / static_cast<double>(count) : 0.0;
        if (depth >= params.max_depth || count < 2 * min_leaf) continue;

        const double parent_score = sum * sum / static_cast<double>(count);
        double best_gain = 1e-12 * std::max(1.0, sum_sq);
        int best_feature = -1;
        double best_threshold = 0.0;
        for (std::size_t f = 0; f < x.cols(); ++f) {
            members.clear();
            for (auto i : sorted.order(f)) {
                if (node_of[i] == id) members.push_back(i);
            }
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < members.size(); ++k) {
                left_sum += target[members[k]];
                const std::size_t n_left = k + 1;
                const std::size_t n_right = count - n_left;
                if (n_left < min_leaf) continue;
                if (n_right < min_leaf) break;
                const double a = x(members[k], f);
                const double b = x(members[k + 1], f);
                if (!(a < b)) continue;
                const double right_sum = sum - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                                    right_sum * right_sum / static_cast<double>(n_right) - parent_score;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    const double mid = a + (b - a) / 2.0;
                    best_threshold = mid < b ? mid : a;
                }
            }
        }
        if (best_feature < 0) continue;

        const int left = static_cast<int>(nodes.size());
        const int right = left + 1;
        nodes.resize(nodes.size() + 2);
        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        nodes[id].left = left;
        nodes[id].right = right;
        const auto f = static_cast<std::size_t>(best_feature);
        for (std::size_t i = 0; i < n; ++i) {
            if (node_of[i] == id) node_of[i] = x(i, f) <= best_threshold ? left : right;
        }
        stack.push_back({right, depth + 1});
        stack.push_back({left, depth + 1});
    }
    return RegressionTree(std::move(nodes));
}

}  // namespace cspace
