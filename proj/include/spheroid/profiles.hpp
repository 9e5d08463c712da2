#pragma once

#include "spheroid/density.hpp"

namespace spheroid {

// Reference length for the Gaussian benchmark profiles below. The exponent
// -30((r - c)/kProfileUnit)^2 gives peaks of width ~1.3e-5 m at 1e-4 m scale.
inline constexpr double kProfileUnit = 1e-4;

// Sum of Gaussians exp(-30 ((r - c_k)/kProfileUnit)^2), normalized to unit
// mass on the grid.
DensityField gaussian_mixture_psd(const Grid1D& grid, std::span<const double> centers);

// The bimodal benchmark density with peaks at 1.5e-4 m and 2.5e-4 m.
DensityField bimodal_psd(const Grid1D& grid);

}  // namespace spheroid
