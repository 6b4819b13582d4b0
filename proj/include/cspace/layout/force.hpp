#pragma once

#include <utility>
#include <vector>

#include "cspace/layout/geometry.hpp"

namespace cspace {

/// Strengths are in canvas pixels (unit square scaled by `canvas`).
struct ForceParams {
    double k_b = 20.0;
    double k_o = 0.2;
    double collision_radius = 0.01;  // unit-square units
    double link_strength = 0.3;
    double charge_strength = 30.0;  // repulsion magnitude
    double charge_range = 8.0;      // in collision radii
    double velocity_decay = 0.9;    // fraction of velocity removed per tick
    int max_iters = 300;
    double tol = 1e-5;  // unit-square units
    double canvas = 1000.0;
    int projection_rounds = 2000;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Each point linked to its nearest neighbour in the same group. Pairs are
/// reported once with the smaller index first.
std::vector<Edge> nearest_neighbor_edges(const std::vector<Point>& points, const std::vector<int>& group);

struct ForceResult {
    std::vector<Point> positions;
    std::vector<Edge> edges;
    int iterations = 0;
    double mean_displacement = 0.0;
    int overlapping_pairs = 0;  // closer than 2r - eps
    int outside_points = 0;     // farther than eps outside their polygon
};

/// Force simulation followed by alternating collision and containment
/// projections. `polygon_of[i]` indexes `polygons`.
ForceResult force_refine(const std::vector<Point>& initial, const std::vector<int>& polygon_of,
                         const std::vector<Polygon>& polygons, const ForceParams& params);

}  // namespace cspace
