#include "cspace/layout/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace cspace {
namespace {

double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

Point project_onto_segment(Point a, Point b, Point p) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return a;
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

bool on_segment(Point a, Point b, Point p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

// Appends hull vertices strictly left of a->b, ordered from a to b.
void hull_side(std::span<const Point> pts, Point a, Point b, std::vector<Point>& out) {
    double best = 0.0;
    std::size_t best_i = pts.size();
    std::vector<Point> left;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = orient(a, b, pts[i]);
        if (d <= 0.0) continue;
        left.push_back(pts[i]);
        if (d > best) {
            best = d;
            best_i = i;
        }
    }
    if (best_i == pts.size()) return;
    const Point far = pts[best_i];
    hull_side(left, a, far, out);
    out.push_back(far);
    hull_side(left, far, b, out);
}

}  // namespace

std::string_view to_string(PolygonKind kind) noexcept { return kind == PolygonKind::Dummy ? "dummy" : "cluster"; }

double signed_area(std::span<const Point> ring) {
    double s = 0.0;
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) s += cross(ring[i], ring[(i + 1) % n]);
    return 0.5 * s;
}

double area(const Polygon& p) { return std::abs(signed_area(p.vertices)); }

Point centroid(std::span<const Point> ring) {
    const double a = signed_area(ring);
    if (ring.empty()) return {};
    if (std::abs(a) < 1e-300) {
        Point s;
        for (const auto& p : ring) s = s + p;
        return (1.0 / static_cast<double>(ring.size())) * s;
    }
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
        const Point p = ring[i], q = ring[(i + 1) % n];
        const double c = cross(p, q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

void normalize_ring(std::vector<Point>& ring) {
    std::vector<Point> clean;
    for (const auto& p : ring) {
        if (clean.empty() || !(clean.back() == p)) clean.push_back(p);
    }
    while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
    if (signed_area(clean) < 0.0) std::reverse(clean.begin(), clean.end());
    ring = std::move(clean);
}

bool contains(std::span<const Point> ring, Point p) {
    const std::size_t n = ring.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = ring[j], b = ring[i];
        if (orient(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
        if ((b.y > p.y) != (a.y > p.y)) {
            const double x = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool contains_with_margin(std::span<const Point> ring, Point p, double margin) {
    return contains(ring, p) && distance_to_boundary(ring, p) > margin;
}

Point nearest_on_boundary(std::span<const Point> ring, Point p) {
    Point best = ring.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
        const Point q = project_onto_segment(ring[i], ring[(i + 1) % n], p);
        const double d = norm(q - p);
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

double distance_to_boundary(std::span<const Point> ring, Point p) { return norm(nearest_on_boundary(ring, p) - p); }

bool segments_intersect(Point a, Point b, Point c, Point d) {
    const double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    if (d1 == 0 && on_segment(c, d, a)) return true;
    if (d2 == 0 && on_segment(c, d, b)) return true;
    if (d3 == 0 && on_segment(a, b, c)) return true;
    if (d4 == 0 && on_segment(a, b, d)) return true;
    return false;
}

bool is_simple(std::span<const Point> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
        }
    }
    return true;
}

std::vector<Point> quickhull(std::span<const Point> points) {
    if (points.size() < 3) return {};
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(), [](Point a, Point b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    const Point a = *lo, b = *hi;
    if (a == b) return {};
    // Counterclockwise: a, the chain below a-b from a to b, b, the chain
    // above from b back to a. hull_side lists each chain from its first
    // argument to its second.
    std::vector<Point> lower, upper;
    hull_side(points, b, a, lower);
    hull_side(points, a, b, upper);
    std::vector<Point> ring{a};
    ring.insert(ring.end(), lower.rbegin(), lower.rend());
    ring.push_back(b);
    ring.insert(ring.end(), upper.rbegin(), upper.rend());

    double extent = 0.0;
    for (const auto& p : points) extent = std::max(extent, norm(p - a));
    if (ring.size() < 3 || std::abs(signed_area(ring)) <= 1e-12 * extent * extent) return {};
    if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
    return ring;
}

std::vector<Point> circle_polygon(Point center, double radius, int sides) {
    std::vector<Point> out;
    for (int i = 0; i < sides; ++i) {
        const double a = 2.0 * std::numbers::pi * i / sides;
        out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return out;
}

}  // namespace cspace
