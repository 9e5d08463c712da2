#include "spheroid/grid.hpp"

#include <cmath>

namespace spheroid {

Grid1D::Grid1D(double lo, double hi, int n_points) : lo_(lo), hi_(hi), n_(n_points) {
    if (!(lo < hi)) throw std::invalid_argument("Grid1D: lo must be < hi");
    if (n_points < 2) throw std::invalid_argument("Grid1D: need at least 2 points");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("Grid1D: non-finite bounds");
    spacing_ = (hi - lo) / (n_ - 1);
    weights_.assign(n_, spacing_);
    weights_.front() = 0.5 * spacing_;
    weights_.back() = 0.5 * spacing_;
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(n_);
    for (int i = 0; i < n_; ++i) out[i] = node(i);
    return out;
}

}  // namespace spheroid
