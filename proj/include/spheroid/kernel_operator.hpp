#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "spheroid/density.hpp"
#include "spheroid/kernel.hpp"

namespace spheroid {

// Dense discretization of the PSD -> cumulative-CLD map
//
//   (K psi)(ell) = sum_i \int k_i(ell, r) psi_i(r) dr
//
// with one (n_chord x n_radial) block per shape, entries k_i(ell_j, r_m) * w_m
// (radial trapezoid weight). The transpose acts as the adjoint under the
// grid-weighted inner products, so <K psi, Q>_chord = <psi, K* Q>_radial holds
// to rounding by construction.
class KernelOperator {
public:
    static KernelOperator build(const Grid1D& radial, const Grid1D& chord,
                                std::vector<ShapeParam> shapes,
                                AngularQuadratureSpec quad = {});

    const Grid1D& radial_grid() const { return radial_; }
    const Grid1D& chord_grid() const { return chord_; }
    const std::vector<ShapeParam>& shapes() const { return shapes_; }
    const AngularQuadratureSpec& quad_spec() const { return quad_; }
    std::size_t shape_count() const { return shapes_.size(); }

    // weighted matrix block for shape i: entries k_i(ell_j, r_m) * w_m
    const Eigen::MatrixXd& matrix(std::size_t i) const { return mats_.at(i); }

    // Q = sum_i M_i psi_i; PSD grids must match the radial grid.
    DensityField apply(std::span<const DensityField> psds) const;
    DensityField apply(const DensityField& psd) const;

    // raw vector variants used in inner loops (one vector per shape, radial nodes)
    Eigen::VectorXd apply_raw(std::span<const Eigen::VectorXd> psis) const;
    std::vector<Eigen::VectorXd> adjoint_raw(const Eigen::VectorXd& Q) const;

    // (K* Q)_i(r_m) = sum_j k_i(ell_j, r_m) wl_j Q_j
    std::vector<DensityField> apply_adjoint(const DensityField& Q) const;

    // Power-iteration estimate of the operator norm ||K|| under the weighted
    // norms (deterministic: fixed start vector and iteration count).
    double norm_estimate(int iterations = 100) const;

    // Binary cache keyed by (grids, shapes, quadrature spec).
    std::uint64_t cache_key() const;
    void save(const std::filesystem::path& path) const;
    static std::optional<KernelOperator> load(const std::filesystem::path& path,
                                              const Grid1D& radial, const Grid1D& chord,
                                              const std::vector<ShapeParam>& shapes,
                                              AngularQuadratureSpec quad = {});

private:
    KernelOperator(Grid1D radial, Grid1D chord, std::vector<ShapeParam> shapes,
                   AngularQuadratureSpec quad)
        : radial_(radial), chord_(chord), shapes_(std::move(shapes)), quad_(quad) {}

    Grid1D radial_;
    Grid1D chord_;
    std::vector<ShapeParam> shapes_;
    AngularQuadratureSpec quad_;
    std::vector<Eigen::MatrixXd> mats_;
};

}  // namespace spheroid
