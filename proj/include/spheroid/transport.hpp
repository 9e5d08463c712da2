#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "spheroid/density.hpp"

namespace spheroid {

// Scalar function of time: constant, linearly interpolated samples, or an
// arbitrary callable. Samples are clamped at the ends.
class TimeProfile {
public:
    static TimeProfile constant(double v);
    static TimeProfile sampled(std::vector<double> t, std::vector<double> v);
    static TimeProfile from_function(std::function<double(double)> f);

    double operator()(double t) const;

private:
    TimeProfile() = default;
    std::function<double(double)> fn_;
};

// Per-shape growth rates G_i(t) > 0 on [0, t_max]. Positivity is validated on
// a fine sampling grid; cumulative integrals use cached trapezoid prefix sums
// on the same grid (exact for constant rates).
class GrowthSchedule {
public:
    GrowthSchedule(std::vector<TimeProfile> growth, double t_max, int samples_per_profile = 4096);

    std::size_t shape_count() const { return growth_.size(); }
    double t_max() const { return t_max_; }
    double rate(std::size_t shape, double t) const;

    // \int_{t0}^{t1} G_shape(s) ds, t0 <= t1 within [0, t_max]
    double integral(std::size_t shape, double t0, double t1) const;

    // tau >= 0 with \int_{t0}^{t0+tau} G = target; throws if target exceeds the
    // remaining integral up to t_max (by more than the fill-with-zero rule allows).
    // Returns tau possibly > t_max - t0; callers treat that as "not yet nucleated".
    double invert_integral(std::size_t shape, double t0, double target) const;

    // g2 * G1(t) = g1 * G2(t) for all sampled t, within rel_tol (McCabe pairs).
    bool has_constant_ratio(double rel_tol = 1e-10) const;

private:
    std::vector<TimeProfile> growth_;
    double t_max_;
    int n_samples_;
    double dt_samples_;
    std::vector<std::vector<double>> prefix_;  // cumulative integral per shape
};

struct NucleationInput {
    std::vector<TimeProfile> u;  // per shape, >= 0 on [0, t_max]
};

// Multi-shape state on the extended periodic domain [r0, r1],
// r0 = r_min - max_i \int_0^{t_max} G_i, r1 = r_max. Per-shape uniform grids;
// the first and last node are identified (values coincide at every step).
struct ExtendedState {
    double r_min, r_max;
    double time;
    std::vector<Grid1D> grids;
    std::vector<Eigen::VectorXd> values;

    // index of the node at r_min on shape i's grid (r_min and r_max are nodes)
    int physical_begin(std::size_t i) const;
};

// Builds the t=0 extended state: seeds on [r_min, r_max], and for r <= r_min
// the future nucleation values psi_i(0, r) = u_i(tau) with \int_0^tau G_i =
// r_min - r (zero where tau > t_max). The node at r_min carries u_i(0), the
// boundary trace. Spacings must divide [r_min, r_max] evenly; the extended
// domain is padded down to a whole number of cells.
ExtendedState extend_initial_state(std::span<const DensityField> psd0, const NucleationInput& u,
                                   const GrowthSchedule& schedule,
                                   std::span<const double> spacings);

enum class Direction { Forward, Backward };

// First-order upwind update of d(psi)/dt + G(t) d(psi)/dr = 0 over one time
// step (periodic wrap). Forward steps use G at the departure time, backward
// steps G at the arrival time, so a backward step is the exact algebraic
// inverse of the matching forward step at unit Courant number.
// Throws if any shape violates the CFL bound G dt / dx <= 1.
void step(ExtendedState& state, double dt, const GrowthSchedule& schedule, Direction dir);

using StateCallback = std::function<void(const ExtendedState&, int step_index)>;

// n_steps forward steps of size t_max / n_steps; returns the full trajectory
// (n_steps + 1 snapshots). The callback, when set, sees every snapshot.
std::vector<ExtendedState> simulate(ExtendedState state0, const GrowthSchedule& schedule,
                                    double t_max, int n_steps, const StateCallback& cb = {});

// Restriction of one shape's state to [r_min, r_max] (the physical PSD).
DensityField restrict_to_physical(const ExtendedState& state, std::size_t shape);

}  // namespace spheroid
