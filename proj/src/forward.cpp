#include "spheroid/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "spheroid/rng.hpp"

namespace spheroid {

DensityField cumulative(const DensityField& q) {
    if (q.kind == FieldKind::CumulativeCld)
        throw std::invalid_argument("cumulative: field is already cumulative");
    const double h = q.grid.spacing();
    Eigen::VectorXd Q(q.values.size());
    Q[0] = 0.0;
    for (int i = 1; i < q.values.size(); ++i)
        Q[i] = Q[i - 1] + 0.5 * h * (q.values[i - 1] + q.values[i]);
    return DensityField(q.grid, FieldKind::CumulativeCld, std::move(Q));
}

DensityField differentiate(const DensityField& Q) {
    if (Q.kind != FieldKind::CumulativeCld)
        throw std::invalid_argument("differentiate: field is not cumulative");
    const double h = Q.grid.spacing();
    const int n = static_cast<int>(Q.values.size());
    Eigen::VectorXd q(n);
    q[0] = (Q.values[1] - Q.values[0]) / h;
    for (int i = 1; i + 1 < n; ++i) q[i] = (Q.values[i + 1] - Q.values[i - 1]) / (2.0 * h);
    q[n - 1] = (Q.values[n - 1] - Q.values[n - 2]) / h;
    return DensityField(Q.grid, FieldKind::Cld, std::move(q));
}

DensityField add_noise(const DensityField& f, double level, std::uint64_t seed) {
    if (level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
    DensityField out = f;
    if (level == 0.0) return out;
    const double sigma = level * f.values.maxCoeff();
    Rng rng(seed);
    for (int i = 0; i < out.values.size(); ++i) out.values[i] += sigma * rng.normal();
    return out;
}

double estimate_particle_count(const ConcentrationData& c, const ShapeParam& shape,
                               const DensityField& psd_norm) {
    if (!(c.solid_conc > 0.0 && c.solid_density > 0.0 && c.solvent_mass > 0.0))
        throw std::invalid_argument("estimate_particle_count: concentration data must be positive");
    validate(psd_norm, /*expect_normalized=*/true);
    const auto& w = psd_norm.grid.quad_weights();
    double third_moment = 0.0;
    for (int i = 0; i < psd_norm.values.size(); ++i) {
        const double r = psd_norm.grid.node(i);
        third_moment += w[i] * psd_norm.values[i] * r * r * r;
    }
    if (!(third_moment > 0.0))
        throw std::invalid_argument("estimate_particle_count: third moment must be positive");
    return 3.0 / (4.0 * M_PI * shape.eta) * (c.solvent_mass / c.solid_density) * c.solid_conc /
           third_moment;
}

double moment_F(int n, const DensityField& psd) {
    if (n < 1) throw std::invalid_argument("moment_F: n must be >= 1");
    if (!(psd.grid.lo() > 0.0)) throw std::invalid_argument("moment_F: grid must start above 0");
    const auto& w = psd.grid.quad_weights();
    double acc = 0.0;
    for (int i = 0; i < psd.values.size(); ++i)
        acc += w[i] * psd.values[i] / std::pow(psd.grid.node(i), 2.0 * n);
    return acc;
}

}  // namespace spheroid
