#include "cspace/layout/force.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cspace/core/error.hpp"

namespace cspace {
namespace {

// Deterministic unit vector for separating coincident points.
Point jiggle(std::size_t i) {
    const double a = static_cast<double>(i) * 2.399963229728653;
    return {std::cos(a), std::sin(a)};
}

Point inward_target(const std::vector<Point>& ring, Point p, double margin) {
    const Point q = nearest_on_boundary(ring, p);
    const Point d = contains(ring, p) ? p - q : q - p;
    const double len = norm(d);
    if (len == 0.0) return centroid(ring);
    return q + (margin / len) * d;
}

}  // namespace

std::vector<Edge> nearest_neighbor_edges(const std::vector<Point>& points, const std::vector<int>& group) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = i;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i || group[j] != group[i]) continue;
            const double d = norm(points[j] - points[i]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        if (best_j != i) edges.emplace_back(std::min(i, best_j), std::max(i, best_j));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

ForceResult force_refine(const std::vector<Point>& initial, const std::vector<int>& polygon_of,
                         const std::vector<Polygon>& polygons, const ForceParams& params) {
    if (!(params.collision_radius > 0.0)) fail(ErrorKind::Spec, "collision radius must be positive");
    if (params.k_b < 0 || params.k_o < 0 || params.link_strength < 0 || params.charge_strength < 0 ||
        params.velocity_decay < 0 || params.velocity_decay > 1) {
        fail(ErrorKind::Spec, "force strengths must be non-negative");
    }
    if (polygon_of.size() != initial.size()) fail(ErrorKind::Shape, "one polygon index per point is required");
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (polygon_of[i] < 0 || static_cast<std::size_t>(polygon_of[i]) >= polygons.size()) {
            fail(ErrorKind::Assignment, "point " + std::to_string(i) + " has no polygon");
        }
    }

    const std::size_t n = initial.size();
    const double s = params.canvas;
    const double r_px = params.collision_radius * s;
    const double range2 = std::pow(params.charge_range * r_px, 2);

    ForceResult out;
    out.edges = nearest_neighbor_edges(initial, polygon_of);

    std::vector<Point> pos(n), vel(n), anchor(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = anchor[i] = s * initial[i];
    std::vector<std::vector<Point>> rings;
    for (const auto& p : polygons) {
        std::vector<Point> ring;
        for (const auto& v : p.vertices) ring.push_back(s * v);
        rings.push_back(std::move(ring));
    }

    double alpha = 1.0;
    const double alpha_min = 0.001;
    const double alpha_decay = 1.0 - std::pow(alpha_min, 1.0 / 300.0);
    const double keep = 1.0 - params.velocity_decay;
    for (int iter = 0; iter < params.max_iters; ++iter) {
        alpha += (0.0 - alpha) * alpha_decay;

        for (const auto& [a, b] : out.edges) {
            Point d = (pos[b] + vel[b]) - (pos[a] + vel[a]);
            double l = norm(d);
            if (l == 0.0) {
                d = 1e-6 * jiggle(a);
                l = norm(d);
            }
            const double f = (l - 2.0 * r_px) / l * alpha * params.link_strength * 0.5;
            vel[b] = vel[b] - f * d;
            vel[a] = vel[a] + f * d;
        }

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                Point d = pos[j] - pos[i];
                double l2 = dot(d, d);
                if (l2 >= range2) continue;
                if (l2 == 0.0) {
                    d = 1e-6 * jiggle(i + j);
                    l2 = dot(d, d);
                }
                l2 = std::max(l2, r_px * r_px * 0.25);
                const double w = params.charge_strength * alpha / l2;
                vel[i] = vel[i] - w * d;
                vel[j] = vel[j] + w * d;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            vel[i] = vel[i] + (params.k_o * alpha) * (anchor[i] - pos[i]);
            const auto& ring = rings[static_cast<std::size_t>(polygon_of[i])];
            if (!contains(ring, pos[i])) {
                const Point d = nearest_on_boundary(ring, pos[i]) - pos[i];
                const double l = norm(d);
                if (l > 0.0) vel[i] = vel[i] + (params.k_b * alpha / l) * d;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                Point d = (pos[j] + vel[j]) - (pos[i] + vel[i]);
                double l = norm(d);
                if (l >= 2.0 * r_px) continue;
                if (l == 0.0) {
                    d = 1e-6 * jiggle(i * 31 + j);
                    l = norm(d);
                }
                const double push = (2.0 * r_px - l) / l * 0.5;
                vel[i] = vel[i] - push * d;
                vel[j] = vel[j] + push * d;
            }
        }

        double max_step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vel[i] = keep * vel[i];
            pos[i] = pos[i] + vel[i];
            max_step = std::max(max_step, norm(vel[i]));
        }
        out.iterations = iter + 1;
        if (alpha < alpha_min || (iter > 10 && max_step / s < params.tol)) break;
    }

    // Projection phase in unit coordinates: separate overlapping pairs, then
    // pull points back inside with a small margin, until both hold.
    const double r = params.collision_radius;
    const double eps = r / 10.0;
    const double margin = r / 20.0;
    std::vector<Point> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (1.0 / s) * pos[i];
    std::vector<std::vector<Point>> unit_rings;
    for (const auto& poly : polygons) unit_rings.push_back(poly.vertices);

    auto settled = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            if (!contains(unit_rings[static_cast<std::size_t>(polygon_of[i])], p[i])) return false;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (norm(p[j] - p[i]) < 2.0 * r - eps) return false;
            }
        }
        return true;
    };
    for (int round = 0; round < params.projection_rounds && !settled(); ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                Point d = p[j] - p[i];
                double l = norm(d);
                if (l >= 2.0 * r) continue;
                if (l == 0.0) {
                    d = jiggle(i * 31 + j);
                    l = 1.0;
                }
                const double push = 0.5 * (2.0 * r * (1.0 + 1e-6) - l) / l;
                p[i] = p[i] - push * d;
                p[j] = p[j] + push * d;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& ring = unit_rings[static_cast<std::size_t>(polygon_of[i])];
            if (!contains_with_margin(ring, p[i], 0.5 * margin)) p[i] = inward_target(ring, p[i], margin);
        }
    }

    out.positions = p;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += norm(p[i] - initial[i]);
        const auto& ring = unit_rings[static_cast<std::size_t>(polygon_of[i])];
        if (!contains(ring, p[i]) && distance_to_boundary(ring, p[i]) > eps) ++out.outside_points;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norm(p[j] - p[i]) < 2.0 * r - eps) ++out.overlapping_pairs;
        }
    }
    out.mean_displacement = n ? total / static_cast<double>(n) : 0.0;
    return out;
}

}  // namespace cspace
