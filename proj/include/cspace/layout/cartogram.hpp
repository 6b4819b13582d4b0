#pragma once

#include <vector>

#include "cspace/layout/geometry.hpp"

namespace cspace {

struct CartogramParams {
    int grid_res = 128;
    int max_steps = 500;
    double area_tol = 0.05;
};

struct CartogramResult {
    std::vector<Polygon> polygons;
    std::vector<Point> tracers;  // extra points carried by the same flow
    bool converged = false;
    int steps = 0;
    double max_area_error = 0.0;  // over cluster polygons
};

/// Relative error |share(area) - share(weight)| / share(weight) of each
/// polygon, where shares are taken over all polygons.
std::vector<double> area_errors(const std::vector<Polygon>& polygons);

/// Diffusion cartogram on the unit square. The polygons must tile it.
/// Density weight/area is rasterized, diffused with reflecting walls, and
/// every vertex moves with v = -grad(rho)/rho until the cluster polygons
/// are within `area_tol` of their weight share or `max_steps` integration
/// steps are spent.
CartogramResult diffusion_cartogram(const std::vector<Polygon>& polygons, const CartogramParams& params,
                                    const std::vector<Point>& tracers = {});

/// Inserts vertices so that no edge is longer than `max_len`.
std::vector<Point> densify(const std::vector<Point>& ring, double max_len);

}  // namespace cspace
