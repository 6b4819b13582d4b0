#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cspace/core/matrix.hpp"

namespace cspace {

struct ClusterLabels {
    std::vector<int> labels;  // -1 = noise
    int k = 0;
    std::vector<int> sizes;
    int noise = 0;
};

/// Points are neighbours when their distance is <= eps (a point neighbours
/// itself). Clusters are numbered by their lowest-index core point; a border
/// point joins the lowest-numbered cluster that reaches it.
ClusterLabels dbscan(const Matrix& points, double eps, int min_pts);

/// Knee of the sorted k-nearest-neighbour distance curve.
double eps_elbow(const Matrix& points, int k = 4);

struct EmbeddingFile {
    std::vector<std::string> ids;
    Matrix points;
};

/// CSV with header id,x,y.
std::string write_embedding_csv(const std::vector<std::string>& ids, const Matrix& points);
EmbeddingFile load_embedding_csv(std::string_view text);

}  // namespace cspace
