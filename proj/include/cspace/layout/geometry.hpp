#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

namespace cspace {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

enum class PolygonKind { Cluster, Dummy };

std::string_view to_string(PolygonKind kind) noexcept;

inline constexpr double kDummyWeight = 0.1;

/// Simple polygon with counterclockwise vertices, stored open (the first
/// vertex is not repeated).
struct Polygon {
    std::vector<Point> vertices;
    PolygonKind kind = PolygonKind::Cluster;
    int cluster = -1;
    double weight = 1.0;
};

double signed_area(std::span<const Point> ring);
double area(const Polygon& p);
Point centroid(std::span<const Point> ring);

/// Reverses clockwise rings and drops repeated consecutive vertices.
void normalize_ring(std::vector<Point>& ring);

/// Boundary points count as inside.
bool contains(std::span<const Point> ring, Point p);

/// Strictly inside and at least `margin` away from every edge.
bool contains_with_margin(std::span<const Point> ring, Point p, double margin);

Point nearest_on_boundary(std::span<const Point> ring, Point p);
double distance_to_boundary(std::span<const Point> ring, Point p);

bool segments_intersect(Point a, Point b, Point c, Point d);

/// No two non-adjacent edges touch.
bool is_simple(std::span<const Point> ring);

/// Counterclockwise hull vertices. Empty when the points span no area.
std::vector<Point> quickhull(std::span<const Point> points);

/// Regular counterclockwise polygon approximating a circle.
std::vector<Point> circle_polygon(Point center, double radius, int sides = 32);

}  // namespace cspace
