#pragma once

#include <cstdint>
#include <vector>

#include "cspace/core/matrix.hpp"
#include "cspace/embed/dbscan.hpp"

namespace cspace {

struct SampleResult {
    std::vector<std::vector<std::size_t>> kept;  // per cluster, ascending point index
    std::vector<int> quota;                      // m_i
    std::vector<std::size_t> kept_noise;         // label -1 points, always kept
    std::vector<double> density;                 // per point, own-cluster KDE; 0 for noise
    std::vector<std::size_t> all_kept() const;
};

/// Half-away-from-zero rounding of N * n_i / sum(n), floored at 3 and
/// clamped to n_i. Clusters with at most 3 members keep them all.
std::vector<int> sample_quota(const std::vector<int>& sizes, int target);

/// Gaussian KDE of each cluster evaluated at its own members, then
/// weighted draws without replacement proportional to that density.
SampleResult density_sample(const Matrix& points, const ClusterLabels& labels, int target = 100,
                            double bandwidth = 0.5, std::uint64_t seed = 0);

}  // namespace cspace
