#include "spheroid/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spheroid {

// Newton iteration on Legendre polynomials; nodes symmetric about zero.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

AngularQuadrature::AngularQuadrature(AngularQuadratureSpec spec, bool full_domain)
    : spec_(spec), full_(full_domain) {
    if (spec.n_phi < 1 || spec.n_theta < 1)
        throw std::invalid_argument("AngularQuadrature: node counts must be positive");

    std::vector<double> xp, wp, xt, wtv;
    gauss_legendre(spec.n_phi, xp, wp);
    gauss_legendre(spec.n_theta, xt, wtv);

    const double phi_hi = full_domain ? 2.0 * M_PI : M_PI / 2.0;
    const double th_hi = full_domain ? M_PI : M_PI / 2.0;

    phi_.reserve(static_cast<std::size_t>(spec.n_phi) * spec.n_theta);
    theta_.reserve(phi_.capacity());
    weight_.reserve(phi_.capacity());
    for (int it = 0; it < spec.n_theta; ++it) {
        const double th = 0.5 * th_hi * (xt[it] + 1.0);
        const double wt = 0.5 * th_hi * wtv[it] * std::sin(th);
        for (int ip = 0; ip < spec.n_phi; ++ip) {
            const double ph = 0.5 * phi_hi * (xp[ip] + 1.0);
            const double w = 0.5 * phi_hi * wp[ip] * wt;
            phi_.push_back(ph);
            theta_.push_back(th);
            weight_.push_back(w);
        }
    }
    // Normalize to unit total mass. Analytically the mass is 1 (after the
    // 8-fold reduction factor); normalizing removes the O(eps) quadrature
    // residue of \int sin so constants integrate to exactly 1.
    const double total = std::accumulate(weight_.begin(), weight_.end(), 0.0);
    for (double& w : weight_) w /= total;
}

}  // namespace spheroid
