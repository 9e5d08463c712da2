#pragma once

#include <cstdint>

#include "spheroid/density.hpp"
#include "spheroid/geometry.hpp"

namespace spheroid {

// Running trapezoid integral Q(ell) = \int_0^ell q.
DensityField cumulative(const DensityField& q);

// Centered-difference inverse of cumulative(); one-sided stencils at the ends.
DensityField differentiate(const DensityField& Q);

// Adds i.i.d. zero-mean Gaussian noise with standard deviation
// level * max(field). Deterministic under a fixed seed.
DensityField add_noise(const DensityField& f, double level, std::uint64_t seed);

struct ConcentrationData {
    double solid_conc;     // C_s, kg solid per kg solvent
    double solid_density;  // rho_s, kg/m^3
    double solvent_mass;   // M_e, kg
};

// Number of particles per unit volume from the solid concentration:
//   \int psi = (3 / (4 pi eta)) (M_e / rho_s) C_s / \int psd_norm(r) r^3 dr.
double estimate_particle_count(const ConcentrationData& c, const ShapeParam& shape,
                               const DensityField& psd_norm);

// F_n(psi) = \int psi(r) / r^(2n) dr by trapezoid quadrature; grid.lo must be > 0.
double moment_F(int n, const DensityField& psd);

}  // namespace spheroid
