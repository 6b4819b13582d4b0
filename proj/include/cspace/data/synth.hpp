#pragma once

#include <cstdint>
#include <utility>

#include "cspace/data/table.hpp"

namespace cspace {

struct SynthSpec {
    int n_rows = 200;
    int n_cols = 6;
    double correlation = 0.9;
    double missing_fraction = 0.2;
    std::uint64_t seed = 1;
    /// Column mean and standard deviation of the generated Gaussian.
    double mean = 10.0;
    double sd = 2.0;
};

struct SynthData {
    DataTable truth;
    DataTable masked;
};

/// Equicorrelated Gaussian table plus an MCAR-masked copy.
///
/// Columns are x0..x{n-1}, rows s0001.. . Every off-diagonal correlation of
/// the generating distribution equals `spec.correlation`; each cell is masked
/// independently with probability `spec.missing_fraction`. Deterministic in
/// the seed.
SynthData synth_generate(const SynthSpec& spec);

}  // namespace cspace
