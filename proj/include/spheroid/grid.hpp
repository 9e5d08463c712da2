#pragma once

#include <stdexcept>
#include <vector>

namespace spheroid {

// Uniform 1-D grid on [lo, hi] with composite-trapezoid quadrature weights
// (h at interior nodes, h/2 at the ends; weights sum to hi - lo).
class Grid1D {
public:
    Grid1D(double lo, double hi, int n_points);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int n_points() const { return n_; }
    double spacing() const { return spacing_; }
    double node(int i) const { return lo_ + spacing_ * i; }
    const std::vector<double>& quad_weights() const { return weights_; }

    std::vector<double> nodes() const;

    bool operator==(const Grid1D& other) const {
        return lo_ == other.lo_ && hi_ == other.hi_ && n_ == other.n_;
    }
    bool operator!=(const Grid1D& other) const { return !(*this == other); }

private:
    double lo_, hi_;
    int n_;
    double spacing_;
    std::vector<double> weights_;
};

}  // namespace spheroid
