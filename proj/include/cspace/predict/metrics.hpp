#pragma once

#include <span>

namespace cspace {

/// Relative standard deviation in percent: 100 * sigma / |mu|.
/// UndefinedRSD when mu == 0; InputError when sigma < 0.
double rsd(double mu, double sigma);

/// Mean absolute percentage error of a reconstruction, in percent. Terms
/// with x_i == 0 are left out and n shrinks accordingly; UndefinedMAPE when
/// every x_i is zero, ShapeError on a length mismatch.
double mape_reconstruction(std::span<const double> x, std::span<const double> xhat);

}  // namespace cspace
