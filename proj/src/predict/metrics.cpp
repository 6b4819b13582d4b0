#include "cspace/predict/metrics.hpp"

#include <cmath>

#include "cspace/core/error.hpp"

namespace cspace {

double rsd(double mu, double sigma) {
    if (!(sigma >= 0.0)) fail(ErrorKind::Input, "sigma must be non-negative");
    if (mu == 0.0) fail(ErrorKind::UndefinedRsd, "RSD is undefined at mu = 0");
    return sigma / std::abs(mu) * 100.0;
}

double mape_reconstruction(std::span<const double> x, std::span<const double> xhat) {
    if (x.size() != xhat.size()) fail(ErrorKind::Shape, "x and xhat differ in length");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        sum += std::abs((x[i] - xhat[i]) / x[i]);
        ++n;
    }
    if (n == 0) fail(ErrorKind::UndefinedMape, "MAPE is undefined when every x_i is zero");
    return sum / static_cast<double>(n) * 100.0;
}

}  // namespace cspace
