#pragma once

#include "spheroid/geometry.hpp"
#include "spheroid/quadrature.hpp"
#include "spheroid/rng.hpp"

namespace spheroid {

// CLD kernel k(ell, r) = P(L < ell | R = r):
//
//   k(ell, r) = 1 - (1/4pi) \int\int sqrt(max(0, 1 - (ell/2r)^2 alpha)) sin(theta) dtheta dphi
//
// The max(0, .) clamp covers orientations whose maximal chord 2r/sqrt(alpha)
// is already below ell, for which the conditional probability is 1.
// k(0, r) = 0, k is nondecreasing in ell, and k = 1 for ell >= 2r*max(eta, 1).
double kernel_value(double ell, double r, const ShapeParam& shape, const AngularQuadrature& quad);

// a_n(eta) = (1/4pi) \int\int alpha^n sin(theta) dtheta dphi, evaluated with the
// same angular quadrature as kernel_value. a_n(1) = 1.
double moment_a(int n, const ShapeParam& shape, const AngularQuadrature& quad);

// b_n = (2n)! / ((n!)^2 (1-2n) 4^(2n)), negative for n >= 1. Evaluated by the
// multiplicative recurrence b_{n+1}/b_n = (2n+1)(2n+2)(1-2n) / ((n+1)^2 (-1-2n) 16)
// since factorials overflow past n ~ 85.
double moment_b(int n);

// Monte-Carlo chord sampler mirroring the measurement model: a uniform random
// orientation (theta by inverse CDF of sin(theta)/2), then a uniform ordinate
// in (-y_max, y_max). Empirical CDF of samples converges to k(., r).
class ChordSampler {
public:
    ChordSampler(double r, ShapeParam shape, std::uint64_t seed);
    double sample();

private:
    double r_;
    ShapeParam shape_;
    Rng rng_;
};

// Minimum admissible radius; kernel formulas divide by r.
inline constexpr double kRadiusFloor = 1e-12;

}  // namespace spheroid
