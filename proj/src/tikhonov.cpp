#include "spheroid/tikhonov.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace spheroid {

namespace {

// Normal-equation pieces in r_min-scaled coordinates (unknown is r_min * psi).
struct ScaledSystem {
    double len0;        // r_min
    double pen_scale;   // r_min / ell_max
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    Eigen::VectorXd wr;  // scaled radial weights
    double rhs_norm;     // ||K* Q|| in the scaled weighted norm
};

ScaledSystem assemble(const TikhonovProblem& p) {
    if (!p.op) throw std::invalid_argument("tikhonov: operator not set");
    if (p.op->shape_count() != 1)
        throw std::invalid_argument("tikhonov: operator must be single-shape");
    if (p.data.grid != p.op->chord_grid())
        throw std::invalid_argument("tikhonov: data grid does not match operator chord grid");
    if (!(p.delta >= 0.0)) throw std::invalid_argument("tikhonov: delta must be >= 0");
    validate(p.data);

    const Grid1D& radial = p.op->radial_grid();
    const Grid1D& chord = p.op->chord_grid();
    ScaledSystem s;
    s.len0 = radial.lo();
    s.pen_scale = radial.lo() / chord.hi();

    const Eigen::MatrixXd& M = p.op->matrix(0);  // entries k * w_r
    Eigen::VectorXd wl(chord.n_points());
    for (int j = 0; j < wl.size(); ++j) wl[j] = chord.quad_weights()[j] / s.len0;
    s.wr.resize(radial.n_points());
    for (int m = 0; m < s.wr.size(); ++m) s.wr[m] = radial.quad_weights()[m] / s.len0;

    // scaled forward matrix A = M / len0 acts on psit = len0 * psi
    const Eigen::MatrixXd A = M / s.len0;
    s.gram.noalias() = A.transpose() * wl.asDiagonal() * A;
    s.rhs.noalias() = A.transpose() * (wl.cwiseProduct(p.data.values));

    double nrm = 0.0;
    for (int m = 0; m < s.rhs.size(); ++m) nrm += s.rhs[m] * s.rhs[m] / s.wr[m];
    s.rhs_norm = std::sqrt(nrm);  // || wr^-1 rhs ||_wr
    return s;
}

Eigen::VectorXd solve_unconstrained(const ScaledSystem& s, double delta) {
    Eigen::MatrixXd M = s.gram;
    const double deff = delta * s.pen_scale;
    M.diagonal() += deff * s.wr;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    Eigen::VectorXd x = ldlt.solve(s.rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite())
        throw std::runtime_error(
            "tikhonov: normal equations are singular (delta too small for this operator)");
    return x;
}

struct PgResult {
    Eigen::VectorXd x;
    int iterations;
    bool converged;
};

// Accelerated projected gradient (FISTA with restart) on
//   f(x) = x^T H x - 2 b^T x  over x >= 0,
// where H = Wr^-1 gram + deff I is self-adjoint in the Wr inner product.
PgResult solve_nonneg(const ScaledSystem& s, double delta, double tol, int max_iters,
                      const Eigen::VectorXd& warm) {
    const double deff = delta * s.pen_scale;
    const int n = static_cast<int>(s.rhs.size());
    Eigen::MatrixXd H = s.gram;
    for (int i = 0; i < n; ++i) H.row(i) /= s.wr[i];
    H.diagonal().array() += deff;
    Eigen::VectorXd b = s.rhs.cwiseQuotient(s.wr);

    // Lipschitz constant of the gradient: 2 * lambda_max(H), by power iteration
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    double lam = 0.0;
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd Hv = H * v;
        lam = std::sqrt(Hv.cwiseAbs2().dot(s.wr));
        if (lam == 0.0) break;
        v = Hv / lam;
    }
    const double L = 2.0 * std::max(lam, deff);
    const double stop = tol * 2.0 * s.rhs_norm;

    PgResult r{warm.cwiseMax(0.0), 0, false};
    Eigen::VectorXd x = r.x, y = r.x;
    double t = 1.0;
    double f_prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iters; ++it) {
        r.iterations = it;
        Eigen::VectorXd g = 2.0 * (H * y - b);
        Eigen::VectorXd xn = (y - g / L).cwiseMax(0.0);

        Eigen::VectorXd Hxn = H * xn;
        // projected gradient at the candidate point
        Eigen::VectorXd gx = 2.0 * (Hxn - b);
        double pg2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double pg = xn[i] > 0.0 ? gx[i] : std::min(gx[i], 0.0);
            pg2 += s.wr[i] * pg * pg;
        }
        if (std::sqrt(pg2) < stop) {
            r.x = xn;
            r.converged = true;
            return r;
        }
        const double f = xn.dot(s.wr.cwiseProduct(Hxn - 2.0 * b));
        if (f > f_prev) {  // restart momentum on objective increase
            t = 1.0;
            y = xn;
        } else {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = xn + ((t - 1.0) / tn) * (xn - x);
            t = tn;
        }
        f_prev = f;
        x = xn;
    }
    r.x = x;
    return r;
}

TikhonovSolution finish(const TikhonovProblem& p, const ScaledSystem& s,
                        const Eigen::VectorXd& x_scaled, int iterations, bool converged) {
    DensityField psd(p.op->radial_grid(), FieldKind::Psd, x_scaled / s.len0);
    DensityField fit = p.op->apply(psd);
    fit.values -= p.data.values;
    fit.kind = FieldKind::Cld;  // residual, not a cumulative field
    TikhonovSolution out{std::move(psd), 0.0, 0.0, iterations, converged};
    out.residual_norm = weighted_norm(fit);
    out.solution_norm = weighted_norm(out.psd);
    return out;
}

}  // namespace

TikhonovSolution solve(const TikhonovProblem& problem) {
    const ScaledSystem s = assemble(problem);
    Eigen::VectorXd x = solve_unconstrained(s, problem.delta);
    if (!problem.nonneg) return finish(problem, s, x, 0, true);
    PgResult pg = solve_nonneg(s, problem.delta, problem.tol, problem.max_iters, x);
    return finish(problem, s, pg.x, pg.iterations, pg.converged);
}

std::vector<SweepEntry> sweep_delta(const TikhonovProblem& problem, std::span<const double> deltas) {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw std::invalid_argument("sweep_delta: deltas must be positive");
        if (i > 0 && deltas[i] < deltas[i - 1])
            throw std::invalid_argument("sweep_delta: deltas must be sorted ascending");
    }
    std::vector<SweepEntry> out;
    if (deltas.empty()) return out;
    const ScaledSystem s = assemble(problem);
    out.reserve(deltas.size());
    for (double d : deltas) {
        Eigen::VectorXd x = solve_unconstrained(s, d);
        if (problem.nonneg)
            x = solve_nonneg(s, d, problem.tol, problem.max_iters, x).x;
        TikhonovProblem p = problem;
        p.delta = d;
        TikhonovSolution sol = finish(p, s, x, 0, true);
        out.push_back({d, sol.residual_norm, sol.solution_norm});
    }
    return out;
}

}  // namespace spheroid
