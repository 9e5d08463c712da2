#include "spheroid/density.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spheroid {

DensityField::DensityField(Grid1D g, FieldKind k, Eigen::VectorXd v)
    : grid(g), kind(k), values(std::move(v)) {
    if (values.size() != grid.n_points())
        throw std::invalid_argument("DensityField: value count does not match grid");
}

double mass(const DensityField& f) {
    const auto& w = f.grid.quad_weights();
    double acc = 0.0;
    for (int i = 0; i < f.values.size(); ++i) acc += w[i] * f.values[i];
    return acc;
}

double weighted_dot(const DensityField& a, const DensityField& b) {
    if (a.grid != b.grid) throw std::invalid_argument("weighted_dot: grid mismatch");
    const auto& w = a.grid.quad_weights();
    double acc = 0.0;
    for (int i = 0; i < a.values.size(); ++i) acc += w[i] * a.values[i] * b.values[i];
    return acc;
}

double weighted_norm(const DensityField& f) { return std::sqrt(weighted_dot(f, f)); }

DensityField normalized(const DensityField& f) {
    DensityField out = f;
    if (f.kind == FieldKind::CumulativeCld) {
        const double tail = f.values[f.values.size() - 1];
        if (tail == 0.0) throw std::invalid_argument("normalized: cumulative field ends at zero");
        out.values /= tail;
    } else {
        const double m = mass(f);
        if (m == 0.0) throw std::invalid_argument("normalized: zero-mass density");
        out.values /= m;
    }
    return out;
}

void validate(const DensityField& f, bool expect_normalized) {
    for (int i = 0; i < f.values.size(); ++i)
        if (!std::isfinite(f.values[i]))
            throw std::invalid_argument("DensityField: non-finite value at node " + std::to_string(i));
    if (f.kind == FieldKind::CumulativeCld) {
        const double scale = std::abs(f.values[f.values.size() - 1]);
        const double slack = 1e-12 * std::max(scale, 1.0);
        for (int i = 1; i < f.values.size(); ++i)
            if (f.values[i] < f.values[i - 1] - slack)
                throw std::invalid_argument("DensityField: cumulative field decreases at node " +
                                            std::to_string(i));
    } else if (expect_normalized) {
        if (std::abs(mass(f) - 1.0) > 1e-8)
            throw std::invalid_argument("DensityField: normalized density does not integrate to 1");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const DensityField& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    out << "x,value\n";
    for (int i = 0; i < f.values.size(); ++i)
        out << format_double(f.grid.node(i)) << ',' << format_double(f.values[i]) << '\n';
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

DensityField read_csv(const std::filesystem::path& path, FieldKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,value", 0) != 0)
        throw std::runtime_error("read_csv: " + path.string() + ": expected header 'x,value'");
    std::vector<double> xs, vs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double x, v;
        char comma;
        if (!(ss >> x >> comma >> v) || comma != ',')
            throw std::runtime_error("read_csv: " + path.string() + ":" + std::to_string(lineno) +
                                     ": malformed row '" + line + "'");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 2) throw std::runtime_error("read_csv: " + path.string() + ": too few rows");
    const double h = (xs.back() - xs.front()) / (static_cast<double>(xs.size()) - 1);
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::max(std::abs(h), 1e-30))
            throw std::runtime_error("read_csv: " + path.string() + ": grid is not uniform near row " +
                                     std::to_string(i + 1));
    Grid1D grid(xs.front(), xs.back(), static_cast<int>(xs.size()));
    Eigen::VectorXd values = Eigen::Map<Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
    return DensityField(grid, kind, std::move(values));
}

std::vector<int> find_modes(const Eigen::VectorXd& values, double prominence_frac) {
    std::vector<int> out;
    if (values.size() < 3) return out;
    const double floor = prominence_frac * values.maxCoeff();
    for (int i = 1; i + 1 < values.size(); ++i)
        if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] > floor)
            out.push_back(i);
    return out;
}

}  // namespace spheroid
