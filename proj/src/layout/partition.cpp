#include "cspace/layout/partition.hpp"

#include <algorithm>

// Boost 1.74 rescales coordinates to an integer grid by default, which moves
// intersection points by ~1e-8 and yields self-touching rings.
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <numeric>

#include "cspace/core/error.hpp"

namespace cspace {
namespace {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPoint, false, true>;
using BMulti = bg::model::multi_polygon<BPoly>;

BPoly to_bg(const std::vector<Point>& ring) {
    BPoly out;
    for (const auto& p : ring) bg::append(out.outer(), BPoint(p.x, p.y));
    if (!ring.empty()) bg::append(out.outer(), BPoint(ring.front().x, ring.front().y));
    bg::correct(out);
    return out;
}

BPoly box_poly(const Box& b) { return to_bg({{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}}); }

// Drops vertices where the ring doubles back on itself or runs straight on.
// Clipping near-touching shapes leaves such zero-width spikes.
void drop_flat_vertices(std::vector<Point>& ring) {
    bool changed = true;
    while (changed && ring.size() > 3) {
        changed = false;
        for (std::size_t i = 0; i < ring.size() && ring.size() > 3; ++i) {
            const Point a = ring[(i + ring.size() - 1) % ring.size()], b = ring[i], c = ring[(i + 1) % ring.size()];
            const double scale = std::max(norm(b - a), norm(c - b));
            if (std::abs(cross(b - a, c - b)) <= 1e-10 * scale * scale || norm(c - a) <= 1e-12) {
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
            }
        }
    }
}

std::vector<Point> from_bg(const BPoly& poly) {
    std::vector<Point> ring;
    for (const auto& p : poly.outer()) ring.push_back({p.x(), p.y()});
    normalize_ring(ring);
    drop_flat_vertices(ring);
    return ring;
}

BMulti unite(const BMulti& a, const BPoly& b) {
    BMulti out;
    bg::union_(a, b, out);
    return out;
}

double multi_area(const BMulti& m) { return std::abs(bg::area(m)); }

// Splits polygons with interior rings at the middle of a hole's x-range
// until none remain, then returns the largest piece.
BPoly largest_simple_piece(const BMulti& pieces) {
    std::vector<BPoly> work(pieces.begin(), pieces.end());
    std::vector<BPoly> simple;
    for (int guard = 0; !work.empty() && guard < 256; ++guard) {
        BPoly p = work.back();
        work.pop_back();
        if (p.inners().empty()) {
            simple.push_back(p);
            continue;
        }
        bg::model::box<BPoint> hole_box;
        bg::envelope(p.inners().front(), hole_box);
        bg::model::box<BPoint> outer_box;
        bg::envelope(p, outer_box);
        const double cut = 0.5 * (hole_box.min_corner().x() + hole_box.max_corner().x());
        const Box left{outer_box.min_corner().x(), outer_box.min_corner().y(), cut, outer_box.max_corner().y()};
        const Box right{cut, outer_box.min_corner().y(), outer_box.max_corner().x(), outer_box.max_corner().y()};
        for (const auto& half : {left, right}) {
            BMulti part;
            bg::intersection(p, box_poly(half), part);
            for (auto& q : part) work.push_back(q);
        }
    }
    if (simple.empty()) return {};
    return *std::max_element(simple.begin(), simple.end(), [](const BPoly& a, const BPoly& b) {
        return std::abs(bg::area(a)) < std::abs(bg::area(b));
    });
}

void check_inside(const Box& bbox, const std::vector<Polygon>& hulls) {
    constexpr double tol = 1e-9;
    for (const auto& h : hulls) {
        for (const auto& v : h.vertices) {
            if (v.x < bbox.x0 - tol || v.x > bbox.x1 + tol || v.y < bbox.y0 - tol || v.y > bbox.y1 + tol) {
                fail(ErrorKind::Geometry, "cluster hull " + std::to_string(h.cluster) + " leaves the bounding box");
            }
        }
    }
}

struct Partitioner {
    const PartitionParams& params;
    BMulti hulls;
    std::vector<Polygon> out;

    void emit(const std::vector<Point>& ring) {
        if (ring.size() < 3) return;
        Polygon p{ring, PolygonKind::Dummy, -1, kDummyWeight};
        if (area(p) < params.min_area) return;
        out.push_back(std::move(p));
    }

    void process(const Box& cell, int depth) {
        BMulti overlap;
        bg::intersection(box_poly(cell), hulls, overlap);
        if (multi_area(overlap) <= 1e-12) {
            emit({{cell.x0, cell.y0}, {cell.x1, cell.y0}, {cell.x1, cell.y1}, {cell.x0, cell.y1}});
            return;
        }
        if (cell.area() >= params.split_area && depth < 40) {
            split(cell, cell.x1 - cell.x0 >= cell.y1 - cell.y0, 0.5, depth);
            return;
        }
        BMulti rest;
        bg::difference(box_poly(cell), hulls, rest);
        for (const auto& piece : rest) {
            if (piece.inners().empty() || depth >= 60) continue;
            bg::model::box<BPoint> hole_box;
            bg::envelope(piece.inners().front(), hole_box);
            const double cut = 0.5 * (hole_box.min_corner().x() + hole_box.max_corner().x());
            const double t = (cut - cell.x0) / (cell.x1 - cell.x0);
            split(cell, true, t, depth);
            return;
        }
        for (const auto& piece : rest) emit(from_bg(piece));
    }

    void split(const Box& cell, bool vertical, double t, int depth) {
        if (vertical) {
            const double xm = cell.x0 + t * (cell.x1 - cell.x0);
            process({cell.x0, cell.y0, xm, cell.y1}, depth + 1);
            process({xm, cell.y0, cell.x1, cell.y1}, depth + 1);
        } else {
            const double ym = cell.y0 + t * (cell.y1 - cell.y0);
            process({cell.x0, cell.y0, cell.x1, ym}, depth + 1);
            process({cell.x0, ym, cell.x1, cell.y1}, depth + 1);
        }
    }
};

}  // namespace

std::vector<Polygon> convex_hulls(const Matrix& points, const ClusterLabels& labels, double buffer_radius) {
    if (labels.labels.size() != points.rows() || points.cols() != 2) {
        fail(ErrorKind::Shape, "points must be n x 2 with n labels");
    }
    if (!(buffer_radius > 0.0)) fail(ErrorKind::Spec, "buffer radius must be positive");
    std::vector<Polygon> out;
    for (int c = 0; c < labels.k; ++c) {
        std::vector<Point> members;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (labels.labels[i] == c) members.push_back({points(i, 0), points(i, 1)});
        }
        if (members.empty()) continue;
        auto ring = quickhull(members);
        if (ring.empty()) ring = circle_polygon(centroid(members), buffer_radius);
        out.push_back({std::move(ring), PolygonKind::Cluster, c, static_cast<double>(members.size())});
    }
    return out;
}

std::vector<Polygon> resolve_overlaps(const std::vector<Polygon>& hulls, double buffer_radius) {
    std::vector<std::size_t> order(hulls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return area(hulls[a]) < area(hulls[b]);
    });
    std::vector<Polygon> out = hulls;
    BMulti taken;
    for (auto idx : order) {
        const Polygon& h = hulls[idx];
        BMulti rest;
        bg::difference(to_bg(h.vertices), taken, rest);
        BPoly piece = largest_simple_piece(rest);
        if (std::abs(bg::area(piece)) < 1e-6) {
            BMulti ring_rest;
            bg::difference(to_bg(circle_polygon(centroid(h.vertices), buffer_radius)), taken, ring_rest);
            piece = largest_simple_piece(ring_rest);
        }
        if (std::abs(bg::area(piece)) < 1e-6) {
            fail(ErrorKind::Geometry, "cluster " + std::to_string(h.cluster) + " is covered by other clusters");
        }
        out[idx].vertices = from_bg(piece);
        taken = unite(taken, piece);
    }
    return out;
}

std::vector<Polygon> dummy_partition(const Box& bbox, const std::vector<Polygon>& hulls, const PartitionParams& params) {
    if (params.grid < 1 || !(params.split_area > 0.0)) fail(ErrorKind::Spec, "invalid partition parameters");
    check_inside(bbox, hulls);
    Partitioner part{params, {}, {}};
    for (const auto& h : hulls) part.hulls = unite(part.hulls, to_bg(h.vertices));
    const double w = (bbox.x1 - bbox.x0) / params.grid, hgt = (bbox.y1 - bbox.y0) / params.grid;
    for (int j = 0; j < params.grid; ++j) {
        for (int i = 0; i < params.grid; ++i) {
            const Box cell{bbox.x0 + i * w, bbox.y0 + j * hgt, i + 1 == params.grid ? bbox.x1 : bbox.x0 + (i + 1) * w,
                           j + 1 == params.grid ? bbox.y1 : bbox.y0 + (j + 1) * hgt};
            part.process(cell, 0);
        }
    }
    return std::move(part.out);
}

double overlap_area(const std::vector<Point>& a, const std::vector<Point>& b) {
    BMulti out;
    bg::intersection(to_bg(a), to_bg(b), out);
    return multi_area(out);
}

}  // namespace cspace
