#include "spheroid/geometry.hpp"

#include <cmath>

namespace spheroid {

EllipseCoeffs ellipse_coeffs(const ShapeParam& shape, const Orientation& o) {
    const double eta2 = shape.eta * shape.eta;
    const double c = std::cos(o.phi), s = std::sin(o.phi);
    const double ct = std::cos(o.theta), st = std::sin(o.theta);
    const double denom = ct * ct + eta2 * st * st;  // >= min(1, eta^2) > 0
    EllipseCoeffs out;
    out.alpha = c * c / denom + s * s;
    out.beta = s * s / denom + c * c;
    out.gamma = -(eta2 - 1.0) * st * st * std::sin(2.0 * o.phi) / denom;
    return out;
}

double chord_ordinate_max(const EllipseCoeffs& c, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("chord_ordinate_max: r must be positive");
    // 4*alpha*beta - gamma^2 = 8 / (1 + eta^2 + (eta^2-1) cos 2theta) > 0
    const double disc = 4.0 * c.alpha * c.beta - c.gamma * c.gamma;
    return 2.0 * std::sqrt(c.alpha) * r / std::sqrt(disc);
}

std::optional<double> chord_length_at(double y, const EllipseCoeffs& c, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("chord_length_at: r must be positive");
    const double delta = c.gamma * c.gamma * y * y - 4.0 * c.alpha * (c.beta * y * y - r * r);
    if (delta < 0.0) return std::nullopt;  // |y| > y_max, no chord
    return std::sqrt(delta) / c.alpha;
}

}  // namespace spheroid
