#include "cspace/data/synth.hpp"

#include <cmath>
#include <cstdio>

#include "cspace/core/error.hpp"
#include "cspace/core/rng.hpp"

namespace cspace {

SynthData synth_generate(const SynthSpec& spec) {
    if (spec.n_rows < 4) fail(ErrorKind::Spec, "nRows must be >= 4");
    if (spec.n_cols < 2) fail(ErrorKind::Spec, "nCols must be >= 2");
    if (!(spec.missing_fraction >= 0.0 && spec.missing_fraction < 1.0)) {
        fail(ErrorKind::Spec, "missingFraction must lie in [0, 1)");
    }
    // Equicorrelation is positive definite for -1/(n-1) < rho < 1; negative
    // levels are outside the accepted range anyway.
    if (!(spec.correlation >= 0.0 && spec.correlation < 1.0)) {
        fail(ErrorKind::Spec, "correlation must lie in [0, 1)");
    }
    if (!(spec.sd > 0.0)) fail(ErrorKind::Spec, "sd must be positive");

    Rng rng(spec.seed);
    const auto rows = static_cast<std::size_t>(spec.n_rows);
    const auto cols = static_cast<std::size_t>(spec.n_cols);
    const double shared = std::sqrt(spec.correlation);
    const double own = std::sqrt(1.0 - spec.correlation);

    std::vector<Column> columns(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        columns[c].name = "x" + std::to_string(c);
        columns[c].values.resize(rows);
    }
    std::vector<std::string> ids(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "s%04zu", r + 1);
        ids[r] = buf;
        const double common = rng.normal();
        for (std::size_t c = 0; c < cols; ++c) {
            const double z = shared * common + own * rng.normal();
            columns[c].values[r] = spec.mean + spec.sd * z;
        }
    }

    auto masked = columns;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (rng.uniform() < spec.missing_fraction) masked[c].values[r].reset();
        }
    }
    return SynthData{DataTable(ids, std::move(columns)), DataTable(ids, std::move(masked))};
}

}  // namespace cspace
