#include "spheroid/kernel_operator.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace spheroid {

KernelOperator KernelOperator::build(const Grid1D& radial, const Grid1D& chord,
                                     std::vector<ShapeParam> shapes, AngularQuadratureSpec quad) {
    if (shapes.empty()) throw std::invalid_argument("KernelOperator: need at least one shape");
    if (!(radial.lo() >= kRadiusFloor))
        throw std::invalid_argument("KernelOperator: radial grid must start above the radius floor");
    double eta_max = 1.0;
    for (const auto& s : shapes) eta_max = std::max(eta_max, s.eta);
    const double lmax_needed = 2.0 * radial.hi() * eta_max;
    if (chord.hi() < lmax_needed * (1.0 - 1e-12))
        throw std::invalid_argument("KernelOperator: chord grid does not cover ell_max = " +
                                    std::to_string(lmax_needed));

    KernelOperator op(radial, chord, std::move(shapes), quad);
    const AngularQuadrature aq(quad);
    const int nl = chord.n_points(), nr = radial.n_points();
    const auto& wr = radial.quad_weights();

    op.mats_.reserve(op.shapes_.size());
    std::vector<double> alpha(aq.size());
    for (const auto& shape : op.shapes_) {
        for (std::size_t i = 0; i < aq.size(); ++i)
            alpha[i] = alpha_coeff(shape.eta, aq.phi()[i], aq.theta()[i]);
        Eigen::MatrixXd M(nl, nr);
        for (int m = 0; m < nr; ++m) {
            const double r = radial.node(m);
            const double inv2r = 1.0 / (2.0 * r);
            const double lmax_r = 2.0 * r * std::max(shape.eta, 1.0);
            for (int j = 0; j < nl; ++j) {
                const double ell = chord.node(j);
                double k;
                if (ell <= 0.0) {
                    k = 0.0;
                } else if (ell >= lmax_r) {
                    k = 1.0;
                } else {
                    const double c = (ell * inv2r) * (ell * inv2r);
                    double acc = 0.0;
                    for (std::size_t q = 0; q < aq.size(); ++q) {
                        const double x = 1.0 - c * alpha[q];
                        acc += aq.weight()[q] * std::sqrt(std::max(0.0, x));
                    }
                    k = std::clamp(1.0 - acc, 0.0, 1.0);
                }
                M(j, m) = k * wr[m];
            }
        }
        op.mats_.push_back(std::move(M));
    }
    return op;
}

Eigen::VectorXd KernelOperator::apply_raw(std::span<const Eigen::VectorXd> psis) const {
    if (psis.size() != mats_.size())
        throw std::invalid_argument("KernelOperator::apply: wrong number of shape blocks");
    Eigen::VectorXd Q = Eigen::VectorXd::Zero(chord_.n_points());
    for (std::size_t i = 0; i < mats_.size(); ++i) {
        if (psis[i].size() != radial_.n_points())
            throw std::invalid_argument("KernelOperator::apply: radial size mismatch");
        Q.noalias() += mats_[i] * psis[i];
    }
    return Q;
}

DensityField KernelOperator::apply(std::span<const DensityField> psds) const {
    if (psds.size() != mats_.size())
        throw std::invalid_argument("KernelOperator::apply: expected one PSD per shape");
    std::vector<Eigen::VectorXd> raw;
    raw.reserve(psds.size());
    for (const auto& f : psds) {
        if (f.grid != radial_)
            throw std::invalid_argument("KernelOperator::apply: PSD grid does not match radial grid");
        raw.push_back(f.values);
    }
    return DensityField(chord_, FieldKind::CumulativeCld, apply_raw(raw));
}

DensityField KernelOperator::apply(const DensityField& psd) const {
    return apply(std::span<const DensityField>(&psd, 1));
}

std::vector<Eigen::VectorXd> KernelOperator::adjoint_raw(const Eigen::VectorXd& Q) const {
    if (Q.size() != chord_.n_points())
        throw std::invalid_argument("KernelOperator::adjoint: chord size mismatch");
    const auto& wl = chord_.quad_weights();
    const auto& wr = radial_.quad_weights();
    Eigen::VectorXd wQ(Q.size());
    for (int j = 0; j < Q.size(); ++j) wQ[j] = wl[j] * Q[j];
    std::vector<Eigen::VectorXd> out;
    out.reserve(mats_.size());
    for (const auto& M : mats_) {
        Eigen::VectorXd v = M.transpose() * wQ;
        for (int m = 0; m < v.size(); ++m) v[m] /= wr[m];  // matrix entries carry w_r
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<DensityField> KernelOperator::apply_adjoint(const DensityField& Q) const {
    if (Q.grid != chord_)
        throw std::invalid_argument("KernelOperator::apply_adjoint: Q grid does not match chord grid");
    auto raw = adjoint_raw(Q.values);
    std::vector<DensityField> out;
    out.reserve(raw.size());
    for (auto& v : raw) out.emplace_back(radial_, FieldKind::Psd, std::move(v));
    return out;
}

double KernelOperator::norm_estimate(int iterations) const {
    const auto& wr = radial_.quad_weights();
    std::vector<Eigen::VectorXd> v(mats_.size(), Eigen::VectorXd::Ones(radial_.n_points()));
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd Q = apply_raw(v);
        auto w = adjoint_raw(Q);
        double nrm2 = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            for (int m = 0; m < w[i].size(); ++m) nrm2 += wr[m] * w[i][m] * w[i][m];
        lambda = std::sqrt(nrm2);  // ||K* K v|| -> top eigenvalue of K*K
        if (lambda == 0.0) return 0.0;
        for (auto& vi : w) vi /= lambda;
        v = std::move(w);
    }
    return std::sqrt(lambda);  // ||K||
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    return fnv1a(h, &bits, sizeof(bits));
}

constexpr char kMagic[8] = {'S', 'C', 'L', 'D', 'K', 'O', 'P', '1'};

}  // namespace

std::uint64_t KernelOperator::cache_key() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = hash_double(h, radial_.lo());
    h = hash_double(h, radial_.hi());
    h = hash_double(h, static_cast<double>(radial_.n_points()));
    h = hash_double(h, chord_.lo());
    h = hash_double(h, chord_.hi());
    h = hash_double(h, static_cast<double>(chord_.n_points()));
    for (const auto& s : shapes_) h = hash_double(h, s.eta);
    h = hash_double(h, static_cast<double>(quad_.n_phi));
    h = hash_double(h, static_cast<double>(quad_.n_theta));
    return h;
}

void KernelOperator::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("KernelOperator::save: cannot open " + path.string());
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t key = cache_key();
    out.write(reinterpret_cast<const char*>(&key), sizeof(key));
    const std::uint64_t nshapes = shapes_.size();
    out.write(reinterpret_cast<const char*>(&nshapes), sizeof(nshapes));
    const std::uint64_t rows = chord_.n_points(), cols = radial_.n_points();
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    for (const auto& M : mats_)
        out.write(reinterpret_cast<const char*>(M.data()),
                  static_cast<std::streamsize>(sizeof(double) * M.size()));
    if (!out) throw std::runtime_error("KernelOperator::save: write failed");
}

std::optional<KernelOperator> KernelOperator::load(const std::filesystem::path& path,
                                                   const Grid1D& radial, const Grid1D& chord,
                                                   const std::vector<ShapeParam>& shapes,
                                                   AngularQuadratureSpec quad) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) return std::nullopt;
    KernelOperator op(radial, chord, shapes, quad);
    std::uint64_t key = 0, nshapes = 0, rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&key), sizeof(key));
    in.read(reinterpret_cast<char*>(&nshapes), sizeof(nshapes));
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in || key != op.cache_key() || nshapes != shapes.size() ||
        rows != static_cast<std::uint64_t>(chord.n_points()) ||
        cols != static_cast<std::uint64_t>(radial.n_points()))
        return std::nullopt;
    op.mats_.resize(nshapes);
    for (auto& M : op.mats_) {
        M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        in.read(reinterpret_cast<char*>(M.data()),
                static_cast<std::streamsize>(sizeof(double) * M.size()));
    }
    if (!in) return std::nullopt;
    return op;
}

}  // namespace spheroid
