#pragma once

#include <cstddef>
#include <vector>

namespace spheroid {

struct AngularQuadratureSpec {
    int n_phi = 64;
    int n_theta = 64;
    bool operator==(const AngularQuadratureSpec&) const = default;
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor-product quadrature for orientation averages
//   I[f] = (1/4pi) * \int_0^{2pi} \int_0^pi f(phi, theta) sin(theta) dtheta dphi.
//
// The integrands used here (powers of the alpha coefficient and the kernel
// integrand) are invariant under phi -> pi - phi, phi -> phi + pi and
// theta -> pi - theta, so the default rule lives on the reduced quadrant
// [0, pi/2]^2 with an 8-fold symmetry factor. Weights absorb sin(theta) and
// are normalized so they sum to exactly 1.
class AngularQuadrature {
public:
    explicit AngularQuadrature(AngularQuadratureSpec spec = {}, bool full_domain = false);

    std::size_t size() const { return phi_.size(); }
    const std::vector<double>& phi() const { return phi_; }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& weight() const { return weight_; }
    const AngularQuadratureSpec& spec() const { return spec_; }
    bool is_full_domain() const { return full_; }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < phi_.size(); ++i) acc += weight_[i] * f(phi_[i], theta_[i]);
        return acc;
    }

private:
    AngularQuadratureSpec spec_;
    bool full_;
    std::vector<double> phi_, theta_, weight_;
};

}  // namespace spheroid
