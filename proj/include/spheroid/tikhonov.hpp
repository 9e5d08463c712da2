#pragma once

#include <span>
#include <vector>

#include "spheroid/kernel_operator.hpp"

namespace spheroid {

// Single-shape CLD -> PSD inversion by Tikhonov-regularized least squares:
//
//   min_psi ||K psi - Q||^2 + delta * ||psi||^2   (optionally s.t. psi >= 0)
//
// Norms are grid-quadrature L2 norms. Internally all lengths are scaled by
// r_min and the penalty carries the extra dimensionless factor r_min/ell_max,
// which makes delta unit-free and keeps the normal equations well conditioned
// (in raw SI meters the penalty lands at machine epsilon of the Gram matrix).
struct TikhonovProblem {
    const KernelOperator* op = nullptr;  // single-shape operator
    DensityField data;                   // cumulative CLD on the operator's chord grid
    double delta = 1e-3;
    bool nonneg = false;
    double tol = 1e-8;      // projected-gradient stop: ||pg|| < tol * 2||K* Q||
    int max_iters = 50000;  // accelerated projected gradient cap
};

struct TikhonovSolution {
    DensityField psd;
    double residual_norm;  // ||K psi - Q|| (SI weighted)
    double solution_norm;  // ||psi|| (SI weighted)
    int iterations;        // 0 for the unconstrained path
    bool converged;
};

TikhonovSolution solve(const TikhonovProblem& problem);

struct SweepEntry {
    double delta;
    double residual_norm;
    double solution_norm;
};

// One solve per delta, reusing the assembled Gram matrix and right-hand side.
std::vector<SweepEntry> sweep_delta(const TikhonovProblem& problem, std::span<const double> deltas);

}  // namespace spheroid
