#pragma once

#include <vector>

#include "cspace/core/matrix.hpp"
#include "cspace/embed/dbscan.hpp"
#include "cspace/layout/geometry.hpp"

namespace cspace {

struct Box {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double area() const { return (x1 - x0) * (y1 - y0); }
};

/// One polygon per cluster label 0..k-1: the quickhull of its points, or a
/// circle of `buffer_radius` around their centroid when they span no area.
/// Weight is the member count.
std::vector<Polygon> convex_hulls(const Matrix& points, const ClusterLabels& labels, double buffer_radius);

/// Makes hull interiors disjoint. Smaller hulls keep their shape; larger ones
/// lose the overlap. Pieces left with holes are cut through the hole and the
/// largest simple piece is kept.
std::vector<Polygon> resolve_overlaps(const std::vector<Polygon>& hulls, double buffer_radius);

struct PartitionParams {
    int grid = 4;
    double split_area = 0.1;
    double min_area = 1e-4;
};

/// Dummy regions filling `bbox` minus the hulls. Grid cells that overlap a
/// hull split along their longer axis while their area is at least
/// `split_area`; a clipped cell that would have a hole is cut through it.
std::vector<Polygon> dummy_partition(const Box& bbox, const std::vector<Polygon>& hulls,
                                     const PartitionParams& params = {});

/// Area of the intersection of two simple polygons.
double overlap_area(const std::vector<Point>& a, const std::vector<Point>& b);

}  // namespace cspace
