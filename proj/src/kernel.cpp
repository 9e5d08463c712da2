#include "spheroid/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spheroid {

double kernel_value(double ell, double r, const ShapeParam& shape, const AngularQuadrature& quad) {
    if (!std::isfinite(ell) || !std::isfinite(r))
        throw std::invalid_argument("kernel_value: non-finite input");
    if (ell < 0.0) throw std::invalid_argument("kernel_value: ell must be >= 0");
    if (!(r >= kRadiusFloor)) throw std::invalid_argument("kernel_value: r below radius floor");

    if (ell == 0.0) return 0.0;
    const double lmax = 2.0 * r * std::max(shape.eta, 1.0);
    if (ell >= lmax) return 1.0;

    const double c = (ell / (2.0 * r)) * (ell / (2.0 * r));
    const auto& phi = quad.phi();
    const auto& theta = quad.theta();
    const auto& w = quad.weight();
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double x = 1.0 - c * alpha_coeff(shape.eta, phi[i], theta[i]);
        acc += w[i] * std::sqrt(std::max(0.0, x));
    }
    return std::clamp(1.0 - acc, 0.0, 1.0);
}

double moment_a(int n, const ShapeParam& shape, const AngularQuadrature& quad) {
    if (n < 1) throw std::invalid_argument("moment_a: n must be >= 1");
    const auto& phi = quad.phi();
    const auto& theta = quad.theta();
    const auto& w = quad.weight();
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double a = alpha_coeff(shape.eta, phi[i], theta[i]);
        acc += w[i] * std::pow(a, n);
    }
    return acc;
}

double moment_b(int n) {
    if (n < 1) throw std::invalid_argument("moment_b: n must be >= 1");
    double b = -1.0 / 8.0;  // b_1 = 2!/(1 * (1-2) * 16)
    for (int k = 1; k < n; ++k) {
        b *= (2.0 * k + 1.0) * (2.0 * k + 2.0) * (1.0 - 2.0 * k) /
             ((k + 1.0) * (k + 1.0) * (-1.0 - 2.0 * k) * 16.0);
    }
    return b;
}

ChordSampler::ChordSampler(double r, ShapeParam shape, std::uint64_t seed)
    : r_(r), shape_(shape), rng_(seed) {
    if (!(r >= kRadiusFloor)) throw std::invalid_argument("ChordSampler: r below radius floor");
}

double ChordSampler::sample() {
    // orientation: phi uniform, theta by inverse CDF of the sin(theta)/2 marginal
    const double phi = rng_.uniform(0.0, 2.0 * M_PI);
    const double theta = std::acos(1.0 - 2.0 * rng_.uniform());
    const EllipseCoeffs c = ellipse_coeffs(shape_, {phi, theta});
    const double ymax = chord_ordinate_max(c, r_);
    const double y = rng_.uniform(-ymax, ymax);
    const auto len = chord_length_at(y, c, r_);
    return len ? *len : 0.0;  // |y| <= y_max by construction
}

}  // namespace spheroid
