#include "cspace/embed/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cspace/core/error.hpp"
#include "cspace/data/csv.hpp"

namespace cspace {
namespace {

double distance(const Matrix& p, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.cols(); ++c) {
        const double d = p(a, c) - p(b, c);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

ClusterLabels dbscan(const Matrix& points, double eps, int min_pts) {
    if (!(eps > 0.0) || min_pts < 1) fail(ErrorKind::Spec, "dbscan needs eps > 0 and minPts >= 1");
    const std::size_t n = points.rows();
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (distance(points, i, j) <= eps) neighbours[i].push_back(j);
        }
    }
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = neighbours[i].size() >= static_cast<std::size_t>(min_pts);

    ClusterLabels out;
    out.labels.assign(n, -1);
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!core[seed] || out.labels[seed] != -1) continue;
        const int id = out.k++;
        out.labels[seed] = id;
        std::deque<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const auto p = frontier.front();
            frontier.pop_front();
            for (auto q : neighbours[p]) {
                if (out.labels[q] != -1) continue;
                out.labels[q] = id;
                if (core[q]) frontier.push_back(q);
            }
        }
    }
    out.sizes.assign(static_cast<std::size_t>(out.k), 0);
    for (int l : out.labels) {
        if (l < 0) ++out.noise;
        else ++out.sizes[static_cast<std::size_t>(l)];
    }
    return out;
}

double eps_elbow(const Matrix& points, int k) {
    const std::size_t n = points.rows();
    if (n < 2) return 1.0;
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), n - 1);
    std::vector<double> kdist;
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) row.push_back(distance(points, i, j));
        }
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk - 1), row.end());
        kdist.push_back(row[kk - 1]);
    }
    std::sort(kdist.begin(), kdist.end());

    const double lo = kdist.front(), hi = kdist.back();
    double eps = hi;
    if (hi > lo && n > 2) {
        // Largest gap below the chord of the normalized curve.
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xn = static_cast<double>(i) / static_cast<double>(n - 1);
            const double yn = (kdist[i] - lo) / (hi - lo);
            if (xn - yn > best) {
                best = xn - yn;
                eps = kdist[i];
            }
        }
    }
    if (!(eps > 0.0)) {
        double span = 0.0;
        for (std::size_t i = 0; i < n; ++i) span = std::max(span, distance(points, 0, i));
        eps = span > 0.0 ? span * 1e-3 : 1.0;
    }
    return eps;
}

std::string write_embedding_csv(const std::vector<std::string>& ids, const Matrix& points) {
    if (ids.size() != points.rows() || points.cols() != 2) fail(ErrorKind::Shape, "embedding must be n x 2 with n ids");
    std::vector<Cell> xs, ys;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        xs.emplace_back(points(i, 0));
        ys.emplace_back(points(i, 1));
    }
    return write_csv(DataTable(ids, {Column{"x", {}, xs}, Column{"y", {}, ys}}));
}

EmbeddingFile load_embedding_csv(std::string_view text) {
    const DataTable t = load_csv(text);
    const auto x = t.find_column("x");
    const auto y = t.find_column("y");
    if (!x || !y) fail(ErrorKind::Schema, "embedding CSV needs x and y columns");
    EmbeddingFile out{t.row_ids(), Matrix(t.rows(), 2)};
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto& vx = t.at(r, *x);
        const auto& vy = t.at(r, *y);
        if (!vx || !vy || !std::isfinite(*vx) || !std::isfinite(*vy)) {
            fail(ErrorKind::Input, "embedding row '" + t.row_ids()[r] + "' has no coordinates");
        }
        out.points(r, 0) = *vx;
        out.points(r, 1) = *vy;
    }
    return out;
}

}  // namespace cspace
