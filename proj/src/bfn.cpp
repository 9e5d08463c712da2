#include "spheroid/bfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spheroid {

CldTimeSeries::CldTimeSeries(Grid1D chord, std::vector<double> times, Eigen::MatrixXd values)
    : chord_(chord), times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() < 2) throw std::invalid_argument("CldTimeSeries: need at least two time nodes");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("CldTimeSeries: times must be strictly increasing");
    if (values_.rows() != static_cast<Eigen::Index>(times_.size()) ||
        values_.cols() != chord_.n_points())
        throw std::invalid_argument("CldTimeSeries: value matrix shape mismatch");
}

Eigen::VectorXd CldTimeSeries::at(double t) const {
    if (t <= times_.front()) return values_.row(0);
    if (t >= times_.back()) return values_.row(values_.rows() - 1);
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const Eigen::Index i = it - times_.begin();
    const double f = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return (1.0 - f) * values_.row(i - 1) + f * values_.row(i);
}

namespace {

struct CouplingBuilder {
    // restriction + linear interpolation maps between one shape grid's
    // physical segment and the operator radial grid
    static void build(const ExtendedState& st, std::size_t shape, const Grid1D& op_radial,
                      int& begin, int& count, std::vector<int>& op_idx,
                      std::vector<double>& op_frac, std::vector<int>& back_idx,
                      std::vector<double>& back_frac) {
        const Grid1D& g = st.grids[shape];
        begin = st.physical_begin(shape);
        count = g.n_points() - begin;
        const double h = g.spacing();
        op_idx.resize(op_radial.n_points());
        op_frac.resize(op_radial.n_points());
        for (int m = 0; m < op_radial.n_points(); ++m) {
            const double x = (op_radial.node(m) - st.r_min) / h;
            int k = std::min(static_cast<int>(x), count - 2);
            k = std::max(k, 0);
            op_idx[m] = k;
            op_frac[m] = std::clamp(x - k, 0.0, 1.0);
        }
        const double hop = op_radial.spacing();
        back_idx.resize(count);
        back_frac.resize(count);
        for (int j = 0; j < count; ++j) {
            const double x = (g.node(begin + j) - op_radial.lo()) / hop;
            int k = std::min(static_cast<int>(x), op_radial.n_points() - 2);
            k = std::max(k, 0);
            back_idx[j] = k;
            back_frac[j] = std::clamp(x - k, 0.0, 1.0);
        }
    }
};

}  // namespace

void BfnObserver::ensure_coupling(const ExtendedState& state) const {
    if (coupling_ready_) return;
    const Grid1D& radial = op_->radial_grid();
    const double tol = 1e-9 * (state.r_max - state.r_min);
    if (std::abs(radial.lo() - state.r_min) > tol || std::abs(radial.hi() - state.r_max) > tol)
        throw std::invalid_argument("bfn: operator radial grid must span [r_min, r_max]");
    if (state.values.size() != op_->shape_count())
        throw std::invalid_argument("bfn: state shape count does not match operator");
    coupling_.resize(state.values.size());
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        auto& c = coupling_[i];
        CouplingBuilder::build(state, i, radial, c.begin, c.count, c.op_idx, c.op_frac, c.back_idx,
                               c.back_frac);
    }
    coupling_ready_ = true;
}

BfnObserver::BfnObserver(const KernelOperator& op, GrowthSchedule schedule, BfnConfig config)
    : op_(&op), schedule_(std::move(schedule)), cfg_(config) {
    if (cfg_.t_max <= 0.0) throw std::invalid_argument("bfn: t_max must be positive");
    if (cfg_.n_steps < 1) throw std::invalid_argument("bfn: need at least one time step");
    if (cfg_.n_iterations < 2 || cfg_.n_iterations % 2 != 0)
        throw std::invalid_argument("bfn: n_iterations must be a positive even count of half-sweeps");
    if (cfg_.mu < 0.0) throw std::invalid_argument("bfn: mu must be >= 0");
    const double dt = cfg_.t_max / cfg_.n_steps;
    if (cfg_.mu > 0.0) {
        mu_ = cfg_.mu;
    } else {
        if (!(cfg_.gain > 0.0)) throw std::invalid_argument("bfn: gain must be positive");
        const double knorm = op_->norm_estimate();
        if (knorm == 0.0) throw std::invalid_argument("bfn: operator norm is zero");
        mu_ = cfg_.gain / (dt * knorm * knorm);
    }
    const double contraction = dt * mu_ * op_->norm_estimate() * op_->norm_estimate();
    if (contraction > 2.0)
        throw std::invalid_argument("bfn: dt*mu*||K||^2 = " + std::to_string(contraction) +
                                    " exceeds the explicit-correction stability bound 2");
}

void BfnObserver::apply_correction(ExtendedState& state, const Eigen::VectorXd& data_now, double dt,
                                   double* misfit_sq) const {
    const Grid1D& radial = op_->radial_grid();
    const int nr = radial.n_points();
    std::vector<Eigen::VectorXd> on_op(state.values.size());
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        const auto& c = coupling_[i];
        Eigen::VectorXd v(nr);
        const auto& vals = state.values[i];
        for (int m = 0; m < nr; ++m) {
            const int k = c.begin + c.op_idx[m];
            v[m] = (1.0 - c.op_frac[m]) * vals[k] + c.op_frac[m] * vals[k + 1];
        }
        on_op[i] = std::move(v);
    }
    Eigen::VectorXd innov = op_->apply_raw(on_op);
    innov -= data_now;
    if (misfit_sq) {
        double m2 = 0.0;
        const auto& wl = op_->chord_grid().quad_weights();
        for (int j = 0; j < innov.size(); ++j) m2 += wl[j] * innov[j] * innov[j];
        *misfit_sq += dt * m2;
    }
    const auto corr = op_->adjoint_raw(innov);
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        const auto& c = coupling_[i];
        auto& vals = state.values[i];
        // correction acts on [r_min, r_max] only; the kernel vanishes elsewhere
        for (int j = 0; j < c.count; ++j) {
            const int k = c.back_idx[j];
            const double cj = (1.0 - c.back_frac[j]) * corr[i][k] + c.back_frac[j] * corr[i][k + 1];
            vals[c.begin + j] -= dt * mu_ * cj;
        }
        if (c.begin == 0) vals[vals.size() - 1] = vals[0];  // keep periodic pair identified
    }
}

double BfnObserver::forward_sweep(ExtendedState& state, const CldTimeSeries& data) const {
    ensure_coupling(state);
    const double dt = cfg_.t_max / cfg_.n_steps;
    if (std::abs(state.time) > 1e-9 * cfg_.t_max)
        throw std::invalid_argument("bfn: forward sweep must start at t = 0");
    double misfit_sq = 0.0;
    for (int k = 0; k < cfg_.n_steps; ++k) {
        step(state, dt, schedule_, Direction::Forward);
        apply_correction(state, data.at(state.time), dt, &misfit_sq);
    }
    return misfit_sq;
}

double BfnObserver::backward_sweep(ExtendedState& state, const CldTimeSeries& data) const {
    ensure_coupling(state);
    const double dt = cfg_.t_max / cfg_.n_steps;
    if (std::abs(state.time - cfg_.t_max) > 1e-9 * cfg_.t_max)
        throw std::invalid_argument("bfn: backward sweep must start at t = t_max");
    double misfit_sq = 0.0;
    for (int k = 0; k < cfg_.n_steps; ++k) {
        step(state, dt, schedule_, Direction::Backward);
        apply_correction(state, data.at(state.time), dt, &misfit_sq);
    }
    return misfit_sq;
}

BfnResult BfnObserver::run(const ExtendedState& guess, const CldTimeSeries& data,
                           std::span<const DensityField> truth_tmax) const {
    if (data.chord_grid() != op_->chord_grid())
        throw std::invalid_argument("bfn: data chord grid does not match operator");
    if (!truth_tmax.empty() && truth_tmax.size() != op_->shape_count())
        throw std::invalid_argument("bfn: truth must have one field per shape");

    ExtendedState state = guess;
    ensure_coupling(state);
    BfnResult res{state, state, {}};
    res.report.mu_used = mu_;
    const int n_pairs = cfg_.n_iterations / 2;
    res.report.history.reserve(n_pairs);

    for (int n = 1; n <= n_pairs; ++n) {
        const double mf = forward_sweep(state, data);
        BfnIterate it{2 * n, std::numeric_limits<double>::quiet_NaN(), std::sqrt(mf)};
        if (!truth_tmax.empty()) {
            double e2 = 0.0;
            for (std::size_t i = 0; i < truth_tmax.size(); ++i) {
                DensityField est = restrict_to_physical(state, i);
                if (est.grid != truth_tmax[i].grid)
                    throw std::invalid_argument("bfn: truth grid does not match shape restriction");
                est.values -= truth_tmax[i].values;
                e2 += weighted_dot(est, est);
            }
            it.error_tmax = std::sqrt(e2);
        }
        res.report.history.push_back(it);
        res.estimate_tmax = state;

        const std::size_t k = res.report.history.size();
        if (k > 10 && res.report.history[k - 1].misfit > 10.0 * res.report.history[k - 11].misfit) {
            res.report.diverged = true;
            break;
        }
        backward_sweep(state, data);
        res.estimate_t0 = state;
    }

    if (!truth_tmax.empty() && !res.report.diverged) {
        // fit e(n) ~ C * rate^n on pair indices n with 2n >= fit_start
        std::vector<double> errs;
        errs.reserve(res.report.history.size());
        for (const auto& h : res.report.history) errs.push_back(h.error_tmax);
        const int start_pair = std::max(0, (cfg_.fit_start + 1) / 2 - 1);  // position of pair n
        if (static_cast<int>(errs.size()) - start_pair >= 2 &&
            std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; })) {
            auto [pre, rate] = fit_rate(errs, start_pair);
            res.report.fitted_prefactor = pre / rate;  // positions are n-1
            res.report.fitted_rate = rate;
            res.report.rate_valid = true;
        }
    }
    return res;
}

std::pair<double, double> fit_rate(std::span<const double> errors, int start_iteration) {
    if (start_iteration < 0) throw std::invalid_argument("fit_rate: negative start");
    const int n = static_cast<int>(errors.size()) - start_iteration;
    if (n < 2) throw std::invalid_argument("fit_rate: need at least two points past the start");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = start_iteration; i < static_cast<int>(errors.size()); ++i) {
        if (!(errors[i] > 0.0)) throw std::invalid_argument("fit_rate: errors must be positive");
        const double x = i, y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / n;
    return {std::exp(intercept), std::exp(slope)};
}

CldTimeSeries synthesize_cld_series(const KernelOperator& op,
                                    std::span<const ExtendedState> trajectory) {
    if (trajectory.size() < 2)
        throw std::invalid_argument("synthesize_cld_series: need at least two snapshots");
    const Grid1D& radial = op.radial_grid();
    const int nr = radial.n_points();
    std::vector<double> times;
    times.reserve(trajectory.size());
    Eigen::MatrixXd values(trajectory.size(), op.chord_grid().n_points());
    for (std::size_t s = 0; s < trajectory.size(); ++s) {
        const ExtendedState& st = trajectory[s];
        std::vector<Eigen::VectorXd> on_op(st.values.size());
        for (std::size_t i = 0; i < st.values.size(); ++i) {
            const Grid1D& g = st.grids[i];
            const int begin = st.physical_begin(i);
            Eigen::VectorXd v(nr);
            for (int m = 0; m < nr; ++m) {
                const double x = (radial.node(m) - st.r_min) / g.spacing();
                int k = std::min(static_cast<int>(x), g.n_points() - begin - 2);
                k = std::max(k, 0);
                const double f = std::clamp(x - k, 0.0, 1.0);
                v[m] = (1.0 - f) * st.values[i][begin + k] + f * st.values[i][begin + k + 1];
            }
            on_op[i] = std::move(v);
        }
        values.row(static_cast<Eigen::Index>(s)) = op.apply_raw(on_op);
        times.push_back(st.time);
    }
    return CldTimeSeries(op.chord_grid(), std::move(times), std::move(values));
}

}  // namespace spheroid
