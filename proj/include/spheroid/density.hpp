#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "spheroid/grid.hpp"

namespace spheroid {

enum class FieldKind { Psd, Cld, CumulativeCld };

// Values of a density (PSD or CLD) or a cumulative CLD on a Grid1D.
// Raw PSD/CLD are in 1/m/m^3; normalized densities in 1/m; cumulative fields
// dimensionless after normalization.
struct DensityField {
    Grid1D grid;
    FieldKind kind;
    Eigen::VectorXd values;

    DensityField(Grid1D g, FieldKind k)
        : grid(g), kind(k), values(Eigen::VectorXd::Zero(g.n_points())) {}
    DensityField(Grid1D g, FieldKind k, Eigen::VectorXd v);
};

// Quadrature integral of the field.
double mass(const DensityField& f);

// L2 norm under the grid quadrature weights.
double weighted_norm(const DensityField& f);

// Weighted L2 inner product of two fields on the same grid.
double weighted_dot(const DensityField& a, const DensityField& b);

// Densities are normalized by their integral, cumulative fields by the value
// at the last node.
DensityField normalized(const DensityField& f);

// Throws on non-finite values; for normalized densities checks unit mass to
// 1e-8; for cumulative fields checks monotonicity within 1e-12 slack
// (relative to the terminal value).
void validate(const DensityField& f, bool expect_normalized = false);

// CSV with header "x,value"; x in meters. Output is byte-deterministic.
void write_csv(const DensityField& f, const std::filesystem::path& path);
DensityField read_csv(const std::filesystem::path& path, FieldKind kind);

// Round-trip-exact formatting used by all CSV/JSON emitters.
std::string format_double(double v);

// Indices of strict interior local maxima with height above
// prominence_frac * max(values). Used for mode counting in diagnostics.
std::vector<int> find_modes(const Eigen::VectorXd& values, double prominence_frac = 0.10);

}  // namespace spheroid
