#include "cspace/layout/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "cspace/core/error.hpp"
#include "cspace/core/rng.hpp"

namespace cspace {

std::vector<std::size_t> SampleResult::all_kept() const {
    std::vector<std::size_t> out(kept_noise);
    for (const auto& c : kept) out.insert(out.end(), c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> sample_quota(const std::vector<int>& sizes, int target) {
    if (target < 1) fail(ErrorKind::Spec, "target sample size must be >= 1");
    long total = 0;
    for (int s : sizes) {
        if (s < 0) fail(ErrorKind::Spec, "negative cluster size");
        total += s;
    }
    std::vector<int> out;
    for (int s : sizes) {
        if (s <= 3) {
            out.push_back(s);
            continue;
        }
        const double share = static_cast<double>(target) * s / static_cast<double>(total);
        const int rounded = static_cast<int>(std::round(share));  // halves away from zero
        out.push_back(std::min(s, std::max(3, rounded)));
    }
    return out;
}

SampleResult density_sample(const Matrix& points, const ClusterLabels& labels, int target, double bandwidth,
                            std::uint64_t seed) {
    if (labels.labels.size() != points.rows()) fail(ErrorKind::Shape, "labels and points differ in length");
    if (!(bandwidth > 0.0)) fail(ErrorKind::Spec, "bandwidth must be positive");
    const auto k = static_cast<std::size_t>(labels.k);
    std::vector<std::vector<std::size_t>> members(k);
    SampleResult out;
    out.density.assign(points.rows(), 0.0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const int l = labels.labels[i];
        if (l < 0) out.kept_noise.push_back(i);
        else if (static_cast<std::size_t>(l) < k) members[static_cast<std::size_t>(l)].push_back(i);
        else fail(ErrorKind::Shape, "label out of range");
    }
    std::vector<int> sizes;
    for (const auto& m : members) sizes.push_back(static_cast<int>(m.size()));
    out.quota = sample_quota(sizes, target);

    const double norm = 1.0 / (2.0 * M_PI * bandwidth * bandwidth);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    Rng rng(seed);
    for (std::size_t c = 0; c < k; ++c) {
        const auto& m = members[c];
        for (auto i : m) {
            double s = 0.0;
            for (auto j : m) {
                double d2 = 0.0;
                for (std::size_t d = 0; d < points.cols(); ++d) {
                    const double diff = points(i, d) - points(j, d);
                    d2 += diff * diff;
                }
                s += std::exp(-d2 * inv2h2);
            }
            out.density[i] = norm * s / static_cast<double>(m.size());
        }

        const auto quota = static_cast<std::size_t>(out.quota[c]);
        if (quota >= m.size()) {
            out.kept.push_back(m);
            continue;
        }
        std::vector<std::size_t> pool = m;
        std::vector<std::size_t> chosen;
        while (chosen.size() < quota) {
            double total = 0.0;
            for (auto i : pool) total += out.density[i];
            double u = rng.uniform() * total;
            std::size_t pick = pool.size() - 1;
            for (std::size_t p = 0; p < pool.size(); ++p) {
                u -= out.density[pool[p]];
                if (u < 0.0) {
                    pick = p;
                    break;
                }
            }
            chosen.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        std::sort(chosen.begin(), chosen.end());
        out.kept.push_back(std::move(chosen));
    }
    return out;
}

}  // namespace cspace
