#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cspace/core/matrix.hpp"
#include "cspace/embed/dbscan.hpp"
#include "cspace/layout/cartogram.hpp"
#include "cspace/layout/force.hpp"
#include "cspace/layout/partition.hpp"

namespace cspace {

struct LayoutParams {
    int sample_target = 100;
    double bandwidth = 0.5;
    std::uint64_t seed = 0;
    double eps = 0.0;  // 0 picks the k-distance elbow
    int min_pts = 4;
    double padding = 0.05;
    double buffer_radius = 0.015;
    double max_glyph_radius = 0.015;
    double glyph_radius = 0.0;  // 0 sizes glyphs from the cluster areas
    PartitionParams partition;
    CartogramParams cartogram;
    ForceParams force;
};

struct LayoutScene {
    std::vector<std::string> ids;       // kept points
    std::vector<std::size_t> source;    // row of each kept point in the input
    std::vector<std::string> omitted;   // dropped by sampling
    std::vector<int> labels;            // cluster of each kept point
    std::vector<Point> embedded;        // normalized embedding coordinates
    std::vector<Point> initial;         // after the cartogram flow
    std::vector<Point> final;           // after force refinement
    std::vector<Polygon> hulls;         // before the cartogram (clusters then dummies)
    std::vector<Polygon> polygons;      // after the cartogram, same order
    std::vector<Edge> edges;
    double glyph_radius = 0.0;
    bool cartogram_converged = false;
    int cartogram_steps = 0;
    double cartogram_error = 0.0;
    double mean_displacement = 0.0;
    LayoutParams params;
};

/// Sampling, hulls, dummy partition, cartogram and force refinement on a 2D
/// embedding. Noise points join the cluster of their nearest clustered
/// point. Throws Internal("layout cancelled") when `cancel` becomes true
/// between stages.
LayoutScene run_layout(const Matrix& points, const std::vector<std::string>& ids,
                       const std::optional<ClusterLabels>& labels, const LayoutParams& params,
                       const std::atomic<bool>* cancel = nullptr);

nlohmann::json to_json(const LayoutParams& params);
LayoutParams layout_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Polygon& polygon);
nlohmann::json to_json(const LayoutScene& scene);
/// Schema error on missing or mistyped fields.
LayoutScene scene_from_json(const nlohmann::json& j);

/// Final scene on a `size` pixel canvas: polygons, edges, glyph circles.
std::string scene_svg(const LayoutScene& scene, int size = 800);

}  // namespace cspace
