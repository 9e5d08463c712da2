#include "spheroid/profiles.hpp"

#include <cmath>

namespace spheroid {

DensityField gaussian_mixture_psd(const Grid1D& grid, std::span<const double> centers) {
    DensityField f(grid, FieldKind::Psd);
    for (int i = 0; i < grid.n_points(); ++i) {
        const double r = grid.node(i);
        double v = 0.0;
        for (double c : centers) {
            const double u = (r - c) / kProfileUnit;
            v += std::exp(-30.0 * u * u);
        }
        f.values[i] = v;
    }
    return normalized(f);
}

DensityField bimodal_psd(const Grid1D& grid) {
    const double centers[] = {1.5e-4, 2.5e-4};
    return gaussian_mixture_psd(grid, centers);
}

}  // namespace spheroid
