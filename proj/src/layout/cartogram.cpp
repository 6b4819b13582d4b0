#include "cspace/layout/cartogram.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "cspace/core/error.hpp"

namespace cspace {
namespace {

using Mat = Eigen::MatrixXd;
constexpr double kPi = std::numbers::pi;
// Each pass starts from density diffused for kBlur * h^2. Sharper starts
// shear thin regions below the grid scale and fold polygon edges.
constexpr double kBlur = 2.0;

struct Rect {
    double x0, y0, x1, y1;
};

Rect bounds(const std::vector<Point>& ring) {
    Rect r{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (const auto& p : ring) {
        r.x0 = std::min(r.x0, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.x1 = std::max(r.x1, p.x);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

// Cosine-series solution of the diffusion equation on the unit square with
// zero-flux walls. Coefficients come from a DCT-II of cell-centred density;
// fields are evaluated on the (L+1)^2 grid of cell corners.
class DiffusionField {
public:
    explicit DiffusionField(int res) : l_(res) {
        const auto n = static_cast<Eigen::Index>(res);
        dct_.resize(n, n);
        cos_nodes_.resize(n + 1, n);
        dsin_nodes_.resize(n + 1, n);
        decay_.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) dct_(i, k) = std::cos(kPi * k * (i + 0.5) / res);
        }
        for (Eigen::Index i = 0; i <= n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) {
                cos_nodes_(i, k) = std::cos(kPi * k * i / res);
                dsin_nodes_(i, k) = -kPi * k * std::sin(kPi * k * i / res);
            }
        }
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = 0; b < n; ++b) decay_(a, b) = -kPi * kPi * static_cast<double>(a * a + b * b);
        }
    }

    // rho is indexed (y cell, x cell).
    void set_density(const Mat& rho) {
        coeff_ = dct_.transpose() * rho * dct_;
        const double inv = 1.0 / (static_cast<double>(l_) * l_);
        for (Eigen::Index a = 0; a < coeff_.rows(); ++a) {
            for (Eigen::Index b = 0; b < coeff_.cols(); ++b) {
                coeff_(a, b) *= (a == 0 ? 1.0 : 2.0) * (b == 0 ? 1.0 : 2.0) * inv;
            }
        }
        floor_ = 0.5 * rho.minCoeff();
    }

    // Velocity -grad(rho)/rho at time t on the corner grid; returns max |v|.
    // Modes damped below e^-40 are dropped, which also keeps denormals out
    // of the products.
    double velocity(double t, Mat& vx, Mat& vy) {
        Eigen::Index kmax = coeff_.rows();
        if (t > 0.0) {
            const auto limit = static_cast<Eigen::Index>(std::ceil(std::sqrt(40.0 / (kPi * kPi * t)))) + 1;
            kmax = std::min(kmax, limit);
        }
        const Mat b = coeff_.topLeftCorner(kmax, kmax)
                          .cwiseProduct((decay_.topLeftCorner(kmax, kmax) * t).array().exp().matrix());
        const auto cn = cos_nodes_.leftCols(kmax);
        const auto sn = dsin_nodes_.leftCols(kmax);
        const Mat rho = cn * b * cn.transpose();
        const Mat drx = cn * b * sn.transpose();
        const Mat dry = sn * b * cn.transpose();
        vx.resize(rho.rows(), rho.cols());
        vy.resize(rho.rows(), rho.cols());
        double vmax = 0.0;
        lip_ = 0.0;
        for (Eigen::Index i = 0; i < rho.rows(); ++i) {
            for (Eigen::Index j = 0; j < rho.cols(); ++j) {
                const double r = std::max(rho(i, j), floor_);
                vx(i, j) = -drx(i, j) / r;
                vy(i, j) = -dry(i, j) / r;
                vmax = std::max(vmax, std::hypot(vx(i, j), vy(i, j)));
            }
        }
        const double inv_h = static_cast<double>(l_);
        for (Eigen::Index i = 0; i + 1 < rho.rows(); ++i) {
            for (Eigen::Index j = 0; j + 1 < rho.cols(); ++j) {
                const double gx = std::abs(vx(i, j + 1) - vx(i, j)) + std::abs(vx(i + 1, j) - vx(i, j));
                const double gy = std::abs(vy(i, j + 1) - vy(i, j)) + std::abs(vy(i + 1, j) - vy(i, j));
                lip_ = std::max(lip_, std::max(gx, gy) * inv_h);
            }
        }
        return vmax;
    }

    // Bound on the spatial Lipschitz constant of the last velocity field.
    double lipschitz() const { return lip_; }

    int res() const { return l_; }

private:
    int l_;
    Mat dct_, cos_nodes_, dsin_nodes_, decay_, coeff_;
    double floor_ = 1e-12;
    double lip_ = 0.0;
};

Point sample(const Mat& vx, const Mat& vy, Point p, int res) {
    const double fx = std::clamp(p.x, 0.0, 1.0) * res, fy = std::clamp(p.y, 0.0, 1.0) * res;
    const int ix = std::min(static_cast<int>(fx), res - 1), iy = std::min(static_cast<int>(fy), res - 1);
    const double tx = fx - ix, ty = fy - iy;
    auto lerp = [&](const Mat& m) {
        return (1 - ty) * ((1 - tx) * m(iy, ix) + tx * m(iy, ix + 1)) +
               ty * ((1 - tx) * m(iy + 1, ix) + tx * m(iy + 1, ix + 1));
    };
    return {lerp(vx), lerp(vy)};
}

Mat rasterize(const std::vector<Polygon>& polys, int res) {
    std::vector<Rect> boxes;
    std::vector<double> density;
    double total_w = 0.0, total_a = 0.0;
    for (const auto& p : polys) {
        boxes.push_back(bounds(p.vertices));
        const double a = area(p);
        density.push_back(p.weight / std::max(a, 1e-12));
        total_w += p.weight;
        total_a += a;
    }
    const double fallback = total_w / std::max(total_a, 1e-12);
    Mat rho(res, res);
    for (int iy = 0; iy < res; ++iy) {
        const double y = (iy + 0.5) / res;
        for (int ix = 0; ix < res; ++ix) {
            const double x = (ix + 0.5) / res;
            double value = fallback;
            for (std::size_t k = 0; k < polys.size(); ++k) {
                const auto& b = boxes[k];
                if (x < b.x0 || x > b.x1 || y < b.y0 || y > b.y1) continue;
                if (contains(polys[k].vertices, {x, y})) {
                    value = density[k];
                    break;
                }
            }
            rho(iy, ix) = value;
        }
    }
    return rho;
}

double max_cluster_error(const std::vector<Polygon>& polys) {
    const auto errs = area_errors(polys);
    bool any_cluster = false;
    double worst = 0.0;
    for (std::size_t i = 0; i < polys.size(); ++i) {
        if (polys[i].kind != PolygonKind::Cluster) continue;
        any_cluster = true;
        worst = std::max(worst, errs[i]);
    }
    if (!any_cluster) {
        for (double e : errs) worst = std::max(worst, e);
    }
    return worst;
}

}  // namespace

std::vector<double> area_errors(const std::vector<Polygon>& polygons) {
    double total_a = 0.0, total_w = 0.0;
    for (const auto& p : polygons) {
        total_a += area(p);
        total_w += p.weight;
    }
    std::vector<double> out;
    for (const auto& p : polygons) {
        const double want = p.weight / total_w;
        out.push_back(std::abs(area(p) / total_a - want) / want);
    }
    return out;
}

std::vector<Point> densify(const std::vector<Point>& ring, double max_len) {
    std::vector<Point> out;
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
        const Point a = ring[i], b = ring[(i + 1) % n];
        out.push_back(a);
        const int pieces = static_cast<int>(std::ceil(norm(b - a) / max_len));
        for (int s = 1; s < pieces; ++s) out.push_back(a + (static_cast<double>(s) / pieces) * (b - a));
    }
    return out;
}

CartogramResult diffusion_cartogram(const std::vector<Polygon>& polygons, const CartogramParams& params,
                                    const std::vector<Point>& tracers) {
    if (params.grid_res < 8 || params.max_steps < 0 || !(params.area_tol > 0.0)) {
        fail(ErrorKind::Spec, "invalid cartogram parameters");
    }
    if (polygons.empty()) fail(ErrorKind::Geometry, "no polygons to deform");
    double total = 0.0;
    for (const auto& p : polygons) {
        if (!(p.weight > 0.0)) fail(ErrorKind::Spec, "polygon weights must be positive");
        if (p.vertices.size() < 3) fail(ErrorKind::Geometry, "polygon with fewer than 3 vertices");
        for (const auto& v : p.vertices) {
            if (v.x < -1e-9 || v.x > 1 + 1e-9 || v.y < -1e-9 || v.y > 1 + 1e-9) {
                fail(ErrorKind::Geometry, "polygon vertex outside the unit square");
            }
        }
        total += area(p);
    }
    if (std::abs(total - 1.0) > 1e-3) fail(ErrorKind::Geometry, "polygons do not tile the unit square");

    CartogramResult out{polygons, tracers, false, 0, max_cluster_error(polygons)};
    if (out.max_area_error <= params.area_tol) {
        out.converged = true;
        return out;
    }

    const int res = params.grid_res;
    const double h = 1.0 / res;

    DiffusionField field(res);
    CartogramResult best = out;
    Mat vx, vy, vx2, vy2;
    while (out.steps < params.max_steps) {
        // Growing regions stretch their edges, so refine them every pass.
        for (auto& p : out.polygons) p.vertices = densify(p.vertices, h);
        field.set_density(rasterize(out.polygons, res));
        double t = kBlur * h * h;
        const int before = out.steps;
        while (out.steps < params.max_steps) {
            const double vmax = field.velocity(t, vx, vy);
            if (vmax < 1e-4 || t > 10.0) break;
            // Heun step: Euler predictor, then the average of both slopes.
            // Keeping dt * Lip(v) well below 1 makes each step injective, so
            // regions cannot fold over each other.
            const double dt = std::min(0.4 * h / vmax, 0.25 / std::max(field.lipschitz(), 1e-12));
            field.velocity(t + dt, vx2, vy2);
            auto advance = [&](Point& p) {
                const Point v1 = sample(vx, vy, p, res);
                const Point guess{std::clamp(p.x + dt * v1.x, 0.0, 1.0), std::clamp(p.y + dt * v1.y, 0.0, 1.0)};
                const Point v2 = sample(vx2, vy2, guess, res);
                p = {std::clamp(p.x + 0.5 * dt * (v1.x + v2.x), 0.0, 1.0),
                     std::clamp(p.y + 0.5 * dt * (v1.y + v2.y), 0.0, 1.0)};
            };
            for (auto& poly : out.polygons) {
                for (auto& v : poly.vertices) advance(v);
            }
            for (auto& p : out.tracers) advance(p);
            t += dt;
            ++out.steps;
        }
        out.max_area_error = max_cluster_error(out.polygons);
        if (out.max_area_error < best.max_area_error) best = out;
        if (out.max_area_error <= params.area_tol) {
            out.converged = true;
            return out;
        }
        if (out.steps == before) break;
    }
    best.steps = out.steps;
    best.converged = false;
    return best;
}

}  // namespace cspace
