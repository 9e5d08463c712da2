#pragma once

#include <optional>

#include "spheroid/kernel_operator.hpp"
#include "spheroid/transport.hpp"

namespace spheroid {

// Measured (or synthesized) cumulative CLD over time, on the operator's chord
// grid; linear interpolation between stored time nodes.
class CldTimeSeries {
public:
    CldTimeSeries(Grid1D chord, std::vector<double> times, Eigen::MatrixXd values);

    const Grid1D& chord_grid() const { return chord_; }
    const std::vector<double>& times() const { return times_; }
    const Eigen::MatrixXd& values() const { return values_; }  // row per time node
    Eigen::VectorXd at(double t) const;

private:
    Grid1D chord_;
    std::vector<double> times_;
    Eigen::MatrixXd values_;
};

struct BfnConfig {
    double mu = 0.0;     // observer gain; 0 selects gain/(dt * ||K||^2)
    double gain = 0.8;   // per-step contraction fraction of the top observable mode
    int n_iterations = 100;  // total half-sweeps (the paper's 2n count)
    int fit_start = 30;      // geometric rate fitted on iterates 2n >= fit_start
    int n_steps = 100;       // time steps per sweep
    double t_max = 0.0;
};

struct BfnIterate {
    int iteration;      // even iterate index 2n after the n-th forward sweep
    double error_tmax;  // ||truth - estimate|| at t_max (NaN without truth)
    double misfit;      // sqrt(\int_0^{tmax} ||K psihat - Qbar||^2 dt) over the sweep
};

struct BfnReport {
    std::vector<BfnIterate> history;
    double mu_used = 0.0;
    double fitted_prefactor = 0.0;
    double fitted_rate = 0.0;
    bool rate_valid = false;
    bool diverged = false;
};

struct BfnResult {
    ExtendedState estimate_t0;    // after the last backward sweep
    ExtendedState estimate_tmax;  // after the last forward sweep
    BfnReport report;
};

// Back-and-Forth Nudging: alternating forward/backward Luenberger observers
//
//   d(psihat)/dt = -G d(psihat)/dr -/+ mu K*(K psihat - Qbar)
//
// discretized by operator splitting: one upwind transport substep, then the
// explicit correction psihat <- psihat - dt mu K*(K psihat - Qbar(t_new))
// applied on [r_min, r_max] only (the kernel vanishes elsewhere). Sweeps are
// exactly reversible at mu = 0 and unit Courant number.
class BfnObserver {
public:
    BfnObserver(const KernelOperator& op, GrowthSchedule schedule, BfnConfig config);

    const BfnConfig& config() const { return cfg_; }
    double resolved_mu() const { return mu_; }

    // One half-sweep; state time must be 0 (forward) or t_max (backward).
    // Returns the accumulated squared misfit integral of the sweep.
    double forward_sweep(ExtendedState& state, const CldTimeSeries& data) const;
    double backward_sweep(ExtendedState& state, const CldTimeSeries& data) const;

    // Full run from an initial guess at t = 0. When truth_tmax is given
    // (per-shape restrictions to [r_min, r_max]), per-iteration errors at
    // t_max are recorded and a geometric rate is fitted. Aborts (diverged)
    // if the sweep misfit grows by 10x over 10 iterations.
    BfnResult run(const ExtendedState& guess, const CldTimeSeries& data,
                  std::span<const DensityField> truth_tmax = {}) const;

private:
    struct ShapeCoupling;  // shape grid <-> operator radial grid maps
    void apply_correction(ExtendedState& state, const Eigen::VectorXd& data_now,
                          double dt, double* misfit_sq) const;

    const KernelOperator* op_;
    GrowthSchedule schedule_;
    BfnConfig cfg_;
    double mu_;
    // restriction / interpolation bookkeeping, built once
    struct Coupling {
        int begin;                        // first shape node inside [r_min, r_max]
        int count;                        // node count inside [r_min, r_max]
        std::vector<int> op_idx;          // per op node: lower shape-node index
        std::vector<double> op_frac;      // per op node: interpolation fraction
        std::vector<int> back_idx;        // per shape node: lower op-node index
        std::vector<double> back_frac;    // per shape node: interpolation fraction
    };
    mutable std::vector<Coupling> coupling_;
    mutable bool coupling_ready_ = false;
    void ensure_coupling(const ExtendedState& state) const;
};

// Least-squares fit of log(errors[i]) ~ log(prefactor) + i*log(rate) over
// i >= start_iteration. Returns {prefactor, rate}; errors must be positive.
std::pair<double, double> fit_rate(std::span<const double> errors, int start_iteration);

// Cumulative CLD series K(psi(t_k)) for every snapshot of a trajectory,
// restricting/interpolating each shape onto the operator's radial grid.
CldTimeSeries synthesize_cld_series(const KernelOperator& op,
                                    std::span<const ExtendedState> trajectory);

}  // namespace spheroid
