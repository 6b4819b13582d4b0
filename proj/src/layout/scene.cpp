#include "cspace/layout/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cspace/core/error.hpp"
#include "cspace/data/csv.hpp"
#include "cspace/layout/sampling.hpp"

namespace cspace {
namespace {

using nlohmann::json;

void check_cancel(const std::atomic<bool>* cancel) {
    if (cancel && cancel->load()) fail(ErrorKind::Internal, "layout cancelled");
}

// Uniform scale into [pad, 1 - pad]^2, centred on the shorter axis.
std::vector<Point> normalize(const Matrix& points, double pad) {
    const std::size_t n = points.rows();
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        x0 = std::min(x0, points(i, 0));
        x1 = std::max(x1, points(i, 0));
        y0 = std::min(y0, points(i, 1));
        y1 = std::max(y1, points(i, 1));
    }
    const double span = std::max(x1 - x0, y1 - y0);
    const double scale = span > 0 ? (1.0 - 2.0 * pad) / span : 0.0;
    const double ox = 0.5 - 0.5 * scale * (x1 - x0), oy = 0.5 - 0.5 * scale * (y1 - y0);
    std::vector<Point> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {ox + scale * (points(i, 0) - x0), oy + scale * (points(i, 1) - y0)};
    return out;
}

std::vector<int> absorb_noise(const std::vector<Point>& pts, const ClusterLabels& labels) {
    std::vector<int> out = labels.labels;
    if (labels.k == 0) {
        std::fill(out.begin(), out.end(), 0);
        return out;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (labels.labels[i] >= 0) continue;
        double best = INFINITY;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (labels.labels[j] < 0) continue;
            const double d = norm(pts[j] - pts[i]);
            if (d < best) {
                best = d;
                out[i] = labels.labels[j];
            }
        }
    }
    return out;
}

// Renumbers labels to 0..k-1 in order of first appearance.
ClusterLabels compact(const std::vector<int>& raw) {
    std::vector<int> map;
    ClusterLabels out;
    for (int l : raw) {
        if (static_cast<std::size_t>(l) >= map.size()) map.resize(static_cast<std::size_t>(l) + 1, -1);
        auto& m = map[static_cast<std::size_t>(l)];
        if (m < 0) {
            m = out.k++;
            out.sizes.push_back(0);
        }
        out.labels.push_back(m);
        ++out.sizes[static_cast<std::size_t>(m)];
    }
    return out;
}

Matrix to_matrix(const std::vector<Point>& pts) {
    Matrix m(pts.size(), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m(i, 0) = pts[i].x;
        m(i, 1) = pts[i].y;
    }
    return m;
}

json points_json(const std::vector<Point>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back({p.x, p.y});
    return a;
}

std::vector<Point> points_from(const json& a) {
    std::vector<Point> out;
    for (const auto& p : a) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return out;
}

Polygon polygon_from(const json& j) {
    Polygon p;
    p.vertices = points_from(j.at("vertices"));
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "cluster") p.kind = PolygonKind::Cluster;
    else if (kind == "dummy") p.kind = PolygonKind::Dummy;
    else fail(ErrorKind::Schema, "unknown polygon kind " + kind);
    p.cluster = j.at("cluster").get<int>();
    p.weight = j.at("weight").get<double>();
    return p;
}

}  // namespace

LayoutScene run_layout(const Matrix& points, const std::vector<std::string>& ids,
                       const std::optional<ClusterLabels>& labels, const LayoutParams& params,
                       const std::atomic<bool>* cancel) {
    if (points.cols() != 2 || points.rows() != ids.size()) fail(ErrorKind::Shape, "layout needs n x 2 points and n ids");
    if (points.rows() == 0) fail(ErrorKind::EmptyInput, "no points to lay out");
    for (double v : points.data()) {
        if (!std::isfinite(v)) fail(ErrorKind::Input, "non-finite embedding coordinate");
    }
    if (labels && labels->labels.size() != points.rows()) fail(ErrorKind::Shape, "one label per point is required");

    LayoutScene scene;
    scene.params = params;
    const auto all = normalize(points, params.padding);

    ClusterLabels raw;
    if (labels) {
        raw = *labels;
    } else {
        const double eps = params.eps > 0 ? params.eps : eps_elbow(to_matrix(all), params.min_pts);
        raw = points.rows() > 1 && eps > 0 ? dbscan(to_matrix(all), eps, params.min_pts) : ClusterLabels{};
        if (raw.labels.empty()) raw.labels.assign(points.rows(), -1);
    }
    const auto clusters = compact(absorb_noise(all, raw));
    check_cancel(cancel);

    const auto sample = density_sample(points, clusters, params.sample_target, params.bandwidth, params.seed);
    scene.source = sample.all_kept();
    std::vector<bool> kept(points.rows(), false);
    for (auto i : scene.source) kept[i] = true;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        if (!kept[i]) scene.omitted.push_back(ids[i]);
    }
    std::vector<int> kept_labels;
    for (auto i : scene.source) {
        scene.ids.push_back(ids[i]);
        scene.embedded.push_back(all[i]);
        kept_labels.push_back(clusters.labels[i]);
    }
    const auto kept_clusters = compact(kept_labels);
    scene.labels = kept_clusters.labels;
    check_cancel(cancel);

    auto hulls = resolve_overlaps(convex_hulls(to_matrix(scene.embedded), kept_clusters, params.buffer_radius),
                                  params.buffer_radius);
    const std::size_t n_clusters = hulls.size();
    scene.hulls = hulls;
    for (auto& d : dummy_partition(Box{}, hulls, params.partition)) scene.hulls.push_back(std::move(d));
    check_cancel(cancel);

    const auto carto = diffusion_cartogram(scene.hulls, params.cartogram, scene.embedded);
    scene.polygons = carto.polygons;
    scene.initial = carto.tracers;
    scene.cartogram_converged = carto.converged;
    scene.cartogram_steps = carto.steps;
    scene.cartogram_error = carto.max_area_error;
    check_cancel(cancel);

    std::vector<int> polygon_of(scene.ids.size(), -1);
    std::vector<int> cluster_polygon(static_cast<std::size_t>(kept_clusters.k), -1);
    for (std::size_t p = 0; p < n_clusters; ++p) {
        cluster_polygon[static_cast<std::size_t>(scene.polygons[p].cluster)] = static_cast<int>(p);
    }
    for (std::size_t i = 0; i < scene.ids.size(); ++i) {
        polygon_of[i] = cluster_polygon[static_cast<std::size_t>(scene.labels[i])];
    }

    double radius = params.glyph_radius;
    if (!(radius > 0.0)) {
        radius = params.max_glyph_radius;
        for (std::size_t p = 0; p < n_clusters; ++p) {
            const auto members = static_cast<double>(kept_clusters.sizes[static_cast<std::size_t>(scene.polygons[p].cluster)]);
            radius = std::min(radius, std::sqrt(0.3 * area(scene.polygons[p]) / (members * std::numbers::pi)));
        }
    }
    scene.glyph_radius = radius;
    ForceParams force = params.force;
    force.collision_radius = radius;
    const auto refined = force_refine(scene.initial, polygon_of, scene.polygons, force);
    scene.final = refined.positions;
    scene.edges = refined.edges;
    scene.mean_displacement = refined.mean_displacement;
    return scene;
}

json to_json(const LayoutParams& p) {
    return {
        {"sample_target", p.sample_target},
        {"bandwidth", p.bandwidth},
        {"seed", p.seed},
        {"eps", p.eps},
        {"min_pts", p.min_pts},
        {"padding", p.padding},
        {"buffer_radius", p.buffer_radius},
        {"max_glyph_radius", p.max_glyph_radius},
        {"glyph_radius", p.glyph_radius},
        {"partition", {{"grid", p.partition.grid}, {"split_area", p.partition.split_area}, {"min_area", p.partition.min_area}}},
        {"cartogram",
         {{"grid_res", p.cartogram.grid_res}, {"max_steps", p.cartogram.max_steps}, {"area_tol", p.cartogram.area_tol}}},
        {"force",
         {{"k_b", p.force.k_b},
          {"k_o", p.force.k_o},
          {"link_strength", p.force.link_strength},
          {"charge_strength", p.force.charge_strength},
          {"velocity_decay", p.force.velocity_decay},
          {"max_iters", p.force.max_iters},
          {"tol", p.force.tol}}},
    };
}

LayoutParams layout_params_from_json(const json& j) {
    try {
        LayoutParams p;
        p.sample_target = j.value("sample_target", p.sample_target);
        p.bandwidth = j.value("bandwidth", p.bandwidth);
        p.seed = j.value("seed", p.seed);
        p.eps = j.value("eps", p.eps);
        p.min_pts = j.value("min_pts", p.min_pts);
        p.padding = j.value("padding", p.padding);
        p.buffer_radius = j.value("buffer_radius", p.buffer_radius);
        p.max_glyph_radius = j.value("max_glyph_radius", p.max_glyph_radius);
        p.glyph_radius = j.value("glyph_radius", p.glyph_radius);
        if (j.contains("partition")) {
            const auto& q = j.at("partition");
            p.partition.grid = q.value("grid", p.partition.grid);
            p.partition.split_area = q.value("split_area", p.partition.split_area);
            p.partition.min_area = q.value("min_area", p.partition.min_area);
        }
        if (j.contains("cartogram")) {
            const auto& q = j.at("cartogram");
            p.cartogram.grid_res = q.value("grid_res", p.cartogram.grid_res);
            p.cartogram.max_steps = q.value("max_steps", p.cartogram.max_steps);
            p.cartogram.area_tol = q.value("area_tol", p.cartogram.area_tol);
        }
        if (j.contains("force")) {
            const auto& q = j.at("force");
            p.force.k_b = q.value("k_b", p.force.k_b);
            p.force.k_o = q.value("k_o", p.force.k_o);
            p.force.link_strength = q.value("link_strength", p.force.link_strength);
            p.force.charge_strength = q.value("charge_strength", p.force.charge_strength);
            p.force.velocity_decay = q.value("velocity_decay", p.force.velocity_decay);
            p.force.max_iters = q.value("max_iters", p.force.max_iters);
            p.force.tol = q.value("tol", p.force.tol);
        }
        return p;
    } catch (const json::exception& e) {
        fail(ErrorKind::Schema, std::string("bad layout parameters: ") + e.what());
    }
}

json to_json(const Polygon& polygon) {
    return {{"kind", std::string(to_string(polygon.kind))},
            {"cluster", polygon.cluster},
            {"weight", polygon.weight},
            {"vertices", points_json(polygon.vertices)}};
}

json to_json(const LayoutScene& s) {
    json hulls = json::array(), polys = json::array(), edges = json::array();
    for (const auto& p : s.hulls) hulls.push_back(to_json(p));
    for (const auto& p : s.polygons) polys.push_back(to_json(p));
    for (const auto& [a, b] : s.edges) edges.push_back({a, b});
    return {
        {"ids", s.ids},
        {"source_rows", s.source},
        {"omitted", s.omitted},
        {"labels", s.labels},
        {"embedded", points_json(s.embedded)},
        {"initial", points_json(s.initial)},
        {"final", points_json(s.final)},
        {"hulls", hulls},
        {"polygons", polys},
        {"edges", edges},
        {"glyph_radius", s.glyph_radius},
        {"cartogram", {{"converged", s.cartogram_converged}, {"steps", s.cartogram_steps}, {"max_area_error", s.cartogram_error}}},
        {"mean_displacement", s.mean_displacement},
        {"params", to_json(s.params)},
    };
}

LayoutScene scene_from_json(const json& j) {
    try {
        LayoutScene s;
        s.ids = j.at("ids").get<std::vector<std::string>>();
        s.source = j.at("source_rows").get<std::vector<std::size_t>>();
        s.omitted = j.at("omitted").get<std::vector<std::string>>();
        s.labels = j.at("labels").get<std::vector<int>>();
        s.embedded = points_from(j.at("embedded"));
        s.initial = points_from(j.at("initial"));
        s.final = points_from(j.at("final"));
        for (const auto& p : j.at("hulls")) s.hulls.push_back(polygon_from(p));
        for (const auto& p : j.at("polygons")) s.polygons.push_back(polygon_from(p));
        for (const auto& e : j.at("edges")) s.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        s.glyph_radius = j.at("glyph_radius").get<double>();
        const auto& c = j.at("cartogram");
        s.cartogram_converged = c.at("converged").get<bool>();
        s.cartogram_steps = c.at("steps").get<int>();
        s.cartogram_error = c.at("max_area_error").get<double>();
        s.mean_displacement = j.at("mean_displacement").get<double>();
        s.params = layout_params_from_json(j.at("params"));
        const auto n = s.ids.size();
        if (s.labels.size() != n || s.initial.size() != n || s.final.size() != n || s.embedded.size() != n) {
            fail(ErrorKind::Schema, "scene arrays differ in length");
        }
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::Schema, std::string("bad scene: ") + e.what());
    }
}

std::string scene_svg(const LayoutScene& scene, int size) {
    const double s = size;
    // y grows downwards in SVG.
    auto px = [&](Point p) { return format_double(p.x * s) + "," + format_double((1.0 - p.y) * s); };
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    for (const auto& p : scene.polygons) {
        out << "<polygon class=\"" << to_string(p.kind) << "\" data-cluster=\"" << p.cluster << "\" points=\"";
        for (std::size_t i = 0; i < p.vertices.size(); ++i) out << (i ? " " : "") << px(p.vertices[i]);
        out << "\" fill=\"" << (p.kind == PolygonKind::Cluster ? "#dde8f4" : "none") << "\" stroke=\"#999\"/>\n";
    }
    for (const auto& [a, b] : scene.edges) {
        const auto pa = scene.final[a], pb = scene.final[b];
        out << "<line x1=\"" << format_double(pa.x * s) << "\" y1=\"" << format_double((1 - pa.y) * s) << "\" x2=\""
            << format_double(pb.x * s) << "\" y2=\"" << format_double((1 - pb.y) * s) << "\" stroke=\"#bbb\"/>\n";
    }
    for (std::size_t i = 0; i < scene.final.size(); ++i) {
        out << "<circle data-id=\"" << scene.ids[i] << "\" data-cluster=\"" << scene.labels[i] << "\" cx=\""
            << format_double(scene.final[i].x * s) << "\" cy=\"" << format_double((1 - scene.final[i].y) * s)
            << "\" r=\"" << format_double(scene.glyph_radius * s) << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace cspace
