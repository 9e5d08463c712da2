#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace spheroid {

// Dimensionless aspect ratio of a spheroid: polar semi-axis / equatorial radius.
// eta < 1 oblate, eta = 1 sphere, eta > 1 prolate.
struct ShapeParam {
    double eta;

    explicit ShapeParam(double eta_) : eta(eta_) {
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw std::invalid_argument("ShapeParam: eta must be a positive finite real");
    }

    enum class Class { Oblate, Sphere, Prolate };
    Class classification() const {
        if (eta < 1.0) return Class::Oblate;
        if (eta > 1.0) return Class::Prolate;
        return Class::Sphere;
    }
};

// Probe-frame orientation of the spheroid axis, spherical angles.
// Uniform orientation corresponds to the density sin(theta)/(4*pi) on
// [0,2pi] x [0,pi].
struct Orientation {
    double phi;    // rotation about z, [0, 2pi]
    double theta;  // rotation about y, [0, pi]
};

// Coefficients of the shadow ellipse alpha*x^2 + beta*y^2 + gamma*x*y = r^2
// cast on the plane orthogonal to the beam.
struct EllipseCoeffs {
    double alpha;
    double beta;
    double gamma;
};

EllipseCoeffs ellipse_coeffs(const ShapeParam& shape, const Orientation& o);

// Largest ordinate |y| at which a horizontal line still cuts the ellipse.
double chord_ordinate_max(const EllipseCoeffs& c, double r);

// Length of the horizontal chord at ordinate y, or nullopt if |y| exceeds
// the ellipse support.
std::optional<double> chord_length_at(double y, const EllipseCoeffs& c, double r);

// alpha coefficient alone, as a function of orientation; this is the only
// piece of the ellipse geometry the CLD kernel depends on.
inline double alpha_coeff(double eta, double phi, double theta) {
    const double c = std::cos(phi), s = std::sin(phi);
    const double ct = std::cos(theta), st = std::sin(theta);
    return c * c / (ct * ct + eta * eta * st * st) + s * s;
}

}  // namespace spheroid
