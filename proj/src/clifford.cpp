#include "qsc/clifford.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsc {

FockBasis FockBasis::build(int n_modes)
{
    if (n_modes < 0 || n_modes > kMaxModes)
        throw std::length_error("FockBasis: mode count outside [0, " +
                                std::to_string(kMaxModes) + "]");
    FockBasis b;
    b.n_modes = n_modes;
    b.dim = 1 << n_modes;
    return b;
}

int modes_of_dim(Eigen::Index dim)
{
    int n = 0;
    while ((Eigen::Index{1} << n) < dim)
        ++n;
    if ((Eigen::Index{1} << n) != dim)
        throw std::invalid_argument("dimension is not a power of two");
    return n;
}

cplx field_inner(const ModeGrid& grid, const Vec& w, const Vec& z)
{
    if (w.size() != grid.n_modes() || z.size() != grid.n_modes())
        throw std::invalid_argument("field_inner: dimension mismatch with grid");
    cplx s = 0.0;
    for (int k = 0; k < grid.n_modes(); ++k)
        s += std::conj(w(k)) * z(k) * grid.dt(k);
    return s;
}

double field_norm(const ModeGrid& grid, const Vec& z)
{
    return std::sqrt(std::real(field_inner(grid, z, z)));
}

Vec field_conj(const Vec& z) { return z.conjugate(); }

namespace {

// Jordan-Wigner creation matrix of orthonormal mode k.
void add_creation(Mat& out, int n, int k, cplx coeff)
{
    const int dim = 1 << n;
    for (int s = 0; s < dim; ++s) {
        if (s & (1 << k))
            continue;
        const int below = std::popcount(static_cast<uint32_t>(s) & ((1u << k) - 1));
        const double sgn = (below & 1) ? -1.0 : 1.0;
        out(s | (1 << k), s) += sgn * coeff;
    }
}

} // namespace

Mat creation_op(const ModeGrid& grid, const Vec& z)
{
    const int n = grid.n_modes();
    if (z.size() != n)
        throw std::invalid_argument("creation_op: dimension mismatch with grid");
    Mat out = Mat::Zero(1 << n, 1 << n);
    for (int k = 0; k < n; ++k)
        add_creation(out, n, k, z(k) * std::sqrt(grid.dt(k)));
    return out;
}

Mat annihilation_op(const ModeGrid& grid, const Vec& z)
{
    return creation_op(grid, z).adjoint();
}

Mat field_op(const ModeGrid& grid, const Vec& z)
{
    return creation_op(grid, z) + annihilation_op(grid, field_conj(z));
}

Mat brownian_increment_op(const ModeGrid& grid, int k)
{
    if (k < 0 || k >= grid.n_steps())
        throw std::out_of_range("brownian_increment_op: step out of range");
    Vec z = Vec::Zero(grid.n_modes());
    z(k) = 1.0;
    return field_op(grid, z);
}

Vec brownian_increment_word(const ModeGrid& grid, int k)
{
    if (k < 0 || k >= grid.n_steps())
        throw std::out_of_range("brownian_increment_word: step out of range");
    Vec w = Vec::Zero(Eigen::Index{1} << grid.n_modes());
    w(Eigen::Index{1} << k) = std::sqrt(grid.dt(k));
    return w;
}

Mat brownian_op(const ModeGrid& grid, int j)
{
    Mat w = Mat::Zero(1 << grid.n_modes(), 1 << grid.n_modes());
    for (int k = 0; k < j; ++k)
        w += brownian_increment_op(grid, k);
    return w;
}

Vec brownian_word(const ModeGrid& grid, int j)
{
    Vec w = Vec::Zero(Eigen::Index{1} << grid.n_modes());
    for (int k = 0; k < j; ++k)
        w += brownian_increment_word(grid, k);
    return w;
}

cplx state(const Vec& f) { return f(0); }

cplx state(const Mat& f) { return f(0, 0); }

double op_norm(const Mat& a)
{
    if (a.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(a.adjoint() * a);
    const double lmax = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(lmax, 0.0));
}

double hs_norm(const Mat& a) { return a.norm(); }

double lp_norm(const Mat& f, double p)
{
    if (std::isinf(p))
        return op_norm(f);
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("lp_norm: p must lie in [1,inf]");
    Eigen::SelfAdjointEigenSolver<Mat> es(f.adjoint() * f);
    // m(|f|^p) = <Omega, (f*f)^{p/2} Omega>
    const auto& lam = es.eigenvalues();
    const auto& u = es.eigenvectors();
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        s += std::pow(std::max(lam(i), 0.0), p / 2.0) * std::norm(u(0, i));
    return std::pow(s, 1.0 / p);
}

namespace {

inline uint32_t adapted_mask(int k) { return (k >= 32) ? ~0u : ((1u << k) - 1u); }

} // namespace

bool is_adapted(const Vec& f, int k, double tol)
{
    const uint32_t mask = adapted_mask(k);
    for (Eigen::Index s = 0; s < f.size(); ++s)
        if ((static_cast<uint32_t>(s) & ~mask) && std::abs(f(s)) > tol)
            return false;
    return true;
}

bool is_adapted(const Mat& a, int k, double tol)
{
    const uint32_t mask = adapted_mask(k);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if (((static_cast<uint32_t>(r) & ~mask) || (static_cast<uint32_t>(c) & ~mask)) &&
                std::abs(a(r, c)) > tol)
                return false;
    return true;
}

Vec conditional_expectation(const Vec& f, int k)
{
    if (k < 0)
        throw std::out_of_range("conditional_expectation: negative step");
    const uint32_t mask = adapted_mask(k);
    Vec out = f;
    for (Eigen::Index s = 0; s < out.size(); ++s)
        if (static_cast<uint32_t>(s) & ~mask)
            out(s) = 0.0;
    return out;
}

Mat conditional_expectation(const Mat& a, int k)
{
    // Compression to the step-k block: the orthogonal projection of the
    // Hilbert-Schmidt space onto operators of the adapted subspace.  Every
    // pairing of the operator against adapted vectors is preserved exactly.
    if (k < 0)
        throw std::out_of_range("conditional_expectation: negative step");
    const uint32_t mask = adapted_mask(k);
    Mat out = a;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            if ((static_cast<uint32_t>(r) & ~mask) || (static_cast<uint32_t>(c) & ~mask))
                out(r, c) = 0.0;
    return out;
}

Mat parity_op(int n_modes)
{
    const Eigen::Index dim = Eigen::Index{1} << n_modes;
    Mat u = Mat::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s)
        u(s, s) = (std::popcount(static_cast<uint32_t>(s)) & 1) ? -1.0 : 1.0;
    return u;
}

Vec parity_apply(const Vec& f)
{
    Vec out = f;
    for (Eigen::Index s = 0; s < out.size(); ++s)
        if (std::popcount(static_cast<uint32_t>(s)) & 1)
            out(s) = -out(s);
    return out;
}

int clifford_sign(uint32_t s, uint32_t t)
{
    // multiply psi_s by the generators of t in increasing order; each insert
    // moves the generator left past the higher modes of the current word
    int sgn = 1;
    uint32_t cur = s;
    while (t) {
        const int k = std::countr_zero(t);
        t &= t - 1;
        if (std::popcount(cur >> (k + 1)) & 1)
            sgn = -sgn;
        cur ^= 1u << k;
    }
    return sgn;
}

Vec clifford_mul(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("clifford_mul: basis mismatch");
    const Eigen::Index dim = a.size();
    Vec out = Vec::Zero(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        if (a(s) == 0.0)
            continue;
        for (Eigen::Index t = 0; t < dim; ++t) {
            if (b(t) == 0.0)
                continue;
            const int sgn = clifford_sign(static_cast<uint32_t>(s), static_cast<uint32_t>(t));
            out(s ^ t) += static_cast<double>(sgn) * a(s) * b(t);
        }
    }
    return out;
}

Mat left_mul_matrix(const Vec& a)
{
    const Eigen::Index dim = a.size();
    Mat out = Mat::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        if (a(s) == 0.0)
            continue;
        for (Eigen::Index t = 0; t < dim; ++t) {
            const int sgn = clifford_sign(static_cast<uint32_t>(s), static_cast<uint32_t>(t));
            out(s ^ t, t) += static_cast<double>(sgn) * a(s);
        }
    }
    return out;
}

Mat right_mul_matrix(const Vec& a)
{
    const Eigen::Index dim = a.size();
    Mat out = Mat::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        if (a(s) == 0.0)
            continue;
        for (Eigen::Index t = 0; t < dim; ++t) {
            const int sgn = clifford_sign(static_cast<uint32_t>(t), static_cast<uint32_t>(s));
            out(s ^ t, t) += static_cast<double>(sgn) * a(s);
        }
    }
    return out;
}

} // namespace qsc
