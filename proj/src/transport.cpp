#include "spheroid/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spheroid {

TimeProfile TimeProfile::constant(double v) {
    TimeProfile p;
    p.fn_ = [v](double) { return v; };
    return p;
}

TimeProfile TimeProfile::sampled(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("TimeProfile: need matching sample arrays of size >= 2");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("TimeProfile: times must increase");
    TimeProfile p;
    p.fn_ = [t = std::move(t), v = std::move(v)](double x) {
        if (x <= t.front()) return v.front();
        if (x >= t.back()) return v.back();
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - t.begin());
        const double f = (x - t[i - 1]) / (t[i] - t[i - 1]);
        return v[i - 1] + f * (v[i] - v[i - 1]);
    };
    return p;
}

TimeProfile TimeProfile::from_function(std::function<double(double)> f) {
    TimeProfile p;
    p.fn_ = std::move(f);
    return p;
}

double TimeProfile::operator()(double t) const { return fn_(t); }

GrowthSchedule::GrowthSchedule(std::vector<TimeProfile> growth, double t_max, int samples_per_profile)
    : growth_(std::move(growth)), t_max_(t_max), n_samples_(samples_per_profile) {
    if (growth_.empty()) throw std::invalid_argument("GrowthSchedule: need at least one shape");
    if (!(t_max > 0.0)) throw std::invalid_argument("GrowthSchedule: t_max must be positive");
    if (n_samples_ < 2) throw std::invalid_argument("GrowthSchedule: too few samples");
    dt_samples_ = t_max_ / n_samples_;
    prefix_.resize(growth_.size());
    for (std::size_t i = 0; i < growth_.size(); ++i) {
        auto& pre = prefix_[i];
        pre.assign(n_samples_ + 1, 0.0);
        double prev = growth_[i](0.0);
        if (!(prev > 0.0))
            throw std::invalid_argument("GrowthSchedule: growth rate must be positive at t=0");
        for (int k = 1; k <= n_samples_; ++k) {
            const double g = growth_[i](k * dt_samples_);
            if (!(g > 0.0))
                throw std::invalid_argument("GrowthSchedule: growth rate must be positive on [0, t_max]");
            pre[k] = pre[k - 1] + 0.5 * dt_samples_ * (prev + g);
            prev = g;
        }
    }
}

double GrowthSchedule::rate(std::size_t shape, double t) const { return growth_.at(shape)(t); }

namespace {
double clamp01(double x, double hi) { return std::min(std::max(x, 0.0), hi); }
}  // namespace

double GrowthSchedule::integral(std::size_t shape, double t0, double t1) const {
    if (t1 < t0) throw std::invalid_argument("GrowthSchedule::integral: t1 < t0");
    const auto& pre = prefix_.at(shape);
    auto eval = [&](double t) {
        t = clamp01(t, t_max_);
        const int k = std::min(static_cast<int>(t / dt_samples_), n_samples_ - 1);
        const double tk = k * dt_samples_;
        return pre[k] + 0.5 * (t - tk) * (growth_[shape](tk) + growth_[shape](t));
    };
    return eval(t1) - eval(t0);
}

double GrowthSchedule::invert_integral(std::size_t shape, double t0, double target) const {
    if (target < 0.0) throw std::invalid_argument("GrowthSchedule::invert_integral: negative target");
    if (target == 0.0) return 0.0;
    const double avail = integral(shape, t0, t_max_);
    if (target > avail * (1.0 + 1e-12))
        return std::numeric_limits<double>::infinity();  // nucleates after t_max
    double lo = 0.0, hi = t_max_ - t0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (integral(shape, t0, t0 + mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * t_max_) break;
    }
    return 0.5 * (lo + hi);
}

bool GrowthSchedule::has_constant_ratio(double rel_tol) const {
    if (growth_.size() < 2) return true;
    const double g1_0 = growth_[0](0.0);
    for (std::size_t i = 1; i < growth_.size(); ++i) {
        const double gi_0 = growth_[i](0.0);
        for (int k = 0; k <= n_samples_; ++k) {
            const double t = k * dt_samples_;
            const double lhs = gi_0 * growth_[0](t);
            const double rhs = g1_0 * growth_[i](t);
            if (std::abs(lhs - rhs) > rel_tol * std::max(std::abs(lhs), std::abs(rhs)))
                return false;
        }
    }
    return true;
}

int ExtendedState::physical_begin(std::size_t i) const {
    const Grid1D& g = grids.at(i);
    return static_cast<int>(std::lround((r_min - g.lo()) / g.spacing()));
}

ExtendedState extend_initial_state(std::span<const DensityField> psd0, const NucleationInput& u,
                                   const GrowthSchedule& schedule, std::span<const double> spacings) {
    const std::size_t n_shapes = schedule.shape_count();
    if (psd0.size() != n_shapes || u.u.size() != n_shapes || spacings.size() != n_shapes)
        throw std::invalid_argument("extend_initial_state: per-shape inputs must match schedule");

    const double r_min = psd0[0].grid.lo();
    const double r_max = psd0[0].grid.hi();
    for (const auto& f : psd0) {
        if (f.grid.lo() != r_min || f.grid.hi() != r_max)
            throw std::invalid_argument("extend_initial_state: seed grids must share [r_min, r_max]");
        const double scale = f.values.cwiseAbs().maxCoeff();
        if (std::abs(f.values[f.values.size() - 1]) > 1e-9 * std::max(scale, 1e-300))
            throw std::invalid_argument("extend_initial_state: seed must vanish at r_max");
    }

    double depth = 0.0;
    for (std::size_t i = 0; i < n_shapes; ++i)
        depth = std::max(depth, schedule.integral(i, 0.0, schedule.t_max()));

    ExtendedState st;
    st.r_min = r_min;
    st.r_max = r_max;
    st.time = 0.0;
    const double span = r_max - r_min;
    for (std::size_t i = 0; i < n_shapes; ++i) {
        const double h = spacings[i];
        if (!(h > 0.0)) throw std::invalid_argument("extend_initial_state: spacing must be positive");
        const double cells_phys_d = span / h;
        const int cells_phys = static_cast<int>(std::lround(cells_phys_d));
        if (std::abs(cells_phys_d - cells_phys) > 1e-9 * cells_phys_d || cells_phys < 1)
            throw std::invalid_argument(
                "extend_initial_state: spacing must divide [r_min, r_max] evenly");
        // pad the extension down to a whole number of cells
        const int cells_below = static_cast<int>(std::ceil(depth / h - 1e-9));
        const double r0 = r_min - cells_below * h;
        Grid1D grid(r0, r_max, cells_below + cells_phys + 1);
        Eigen::VectorXd vals = Eigen::VectorXd::Zero(grid.n_points());

        // seed on (r_min, r_max], linearly interpolated from the input grid
        const Grid1D& sg = psd0[i].grid;
        for (int j = cells_below + 1; j < grid.n_points(); ++j) {
            const double r = grid.node(j);
            const double x = (r - sg.lo()) / sg.spacing();
            const int k = std::min(static_cast<int>(x), sg.n_points() - 2);
            const double f = x - k;
            vals[j] = (1.0 - f) * psd0[i].values[k] + f * psd0[i].values[k + 1];
        }
        // nucleation extension on r <= r_min: psi(0, r) = u(tau), \int_0^tau G = r_min - r.
        // The node at r_min carries the boundary trace u(0).
        for (int j = 0; j <= cells_below; ++j) {
            const double r = grid.node(j);
            const double tau = schedule.invert_integral(i, 0.0, std::max(0.0, r_min - r));
            vals[j] = std::isfinite(tau) ? u.u[i](tau) : 0.0;
        }
        st.grids.push_back(grid);
        st.values.push_back(std::move(vals));
    }
    return st;
}

void step(ExtendedState& state, double dt, const GrowthSchedule& schedule, Direction dir) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const double t_rate = dir == Direction::Forward ? state.time : state.time - dt;
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        const double g = schedule.rate(i, t_rate);
        const double h = state.grids[i].spacing();
        const double nu = g * dt / h;
        if (nu > 1.0 + 1e-9)
            throw std::runtime_error("step: CFL violation, G*dt/dx = " + std::to_string(nu));
        Eigen::VectorXd& v = state.values[i];
        const int n = static_cast<int>(v.size());
        Eigen::VectorXd out(n);
        if (dir == Direction::Forward) {
            // upwind for positive velocity; node 0's left neighbor is node n-2
            out[0] = v[0] - nu * (v[0] - v[n - 2]);
            for (int j = 1; j < n; ++j) out[j] = v[j] - nu * (v[j] - v[j - 1]);
        } else {
            // reverse-time transport moves left; node n-1's right neighbor is node 1
            for (int j = 0; j + 1 < n; ++j) out[j] = v[j] + nu * (v[j + 1] - v[j]);
            out[n - 1] = v[n - 1] + nu * (v[1] - v[n - 1]);
        }
        v = std::move(out);
    }
    state.time += dir == Direction::Forward ? dt : -dt;
}

std::vector<ExtendedState> simulate(ExtendedState state0, const GrowthSchedule& schedule,
                                    double t_max, int n_steps, const StateCallback& cb) {
    if (n_steps < 1) throw std::invalid_argument("simulate: need at least one step");
    const double dt = t_max / n_steps;
    std::vector<ExtendedState> traj;
    traj.reserve(n_steps + 1);
    traj.push_back(state0);
    if (cb) cb(traj.back(), 0);
    for (int k = 1; k <= n_steps; ++k) {
        step(state0, dt, schedule, Direction::Forward);
        traj.push_back(state0);
        if (cb) cb(traj.back(), k);
    }
    return traj;
}

DensityField restrict_to_physical(const ExtendedState& state, std::size_t shape) {
    const Grid1D& g = state.grids.at(shape);
    const int begin = state.physical_begin(shape);
    const int count = g.n_points() - begin;
    Grid1D phys(state.r_min, state.r_max, count);
    Eigen::VectorXd vals = state.values[shape].segment(begin, count);
    return DensityField(phys, FieldKind::Psd, std::move(vals));
}

}  // namespace spheroid
