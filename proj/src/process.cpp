#include "qsc/process.hpp"

#include <cmath>

namespace qsc {

VectorProcess::VectorProcess(const ModeGrid& grid, std::vector<Vec> values, bool check)
    : grid_(&grid), values_(std::move(values))
{
    if (static_cast<int>(values_.size()) != grid.n_steps())
        throw std::invalid_argument("VectorProcess: one value per grid step required");
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    for (int k = 0; k < n_steps(); ++k) {
        if (values_[static_cast<size_t>(k)].size() != dim)
            throw std::invalid_argument("VectorProcess: value dimension mismatch");
        if (check && !is_adapted(values_[static_cast<size_t>(k)], k))
            throw AdaptednessError("VectorProcess: value at step " + std::to_string(k) +
                                   " is not C_{t_k}-measurable");
    }
}

VectorProcess VectorProcess::zero(const ModeGrid& grid)
{
    return constant(grid, Vec::Zero(Eigen::Index{1} << grid.n_modes()));
}

VectorProcess VectorProcess::constant(const ModeGrid& grid, const Vec& value)
{
    return VectorProcess(grid, std::vector<Vec>(static_cast<size_t>(grid.n_steps()), value));
}

double VectorProcess::l2_norm() const
{
    double s = 0.0;
    for (int k = 0; k < n_steps(); ++k)
        s += at(k).squaredNorm() * grid_->dt(k);
    return std::sqrt(s);
}

OperatorProcess::OperatorProcess(const ModeGrid& grid, std::vector<Mat> values, NormMode mode,
                                 bool check)
    : grid_(&grid), values_(std::move(values)), mode_(mode)
{
    if (static_cast<int>(values_.size()) != grid.n_steps())
        throw std::invalid_argument("OperatorProcess: one value per grid step required");
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    for (int k = 0; k < n_steps(); ++k) {
        const Mat& m = values_[static_cast<size_t>(k)];
        if (m.rows() != dim || m.cols() != dim)
            throw std::invalid_argument("OperatorProcess: value dimension mismatch");
        if (check && !is_adapted(m, k))
            throw AdaptednessError("OperatorProcess: value at step " + std::to_string(k) +
                                   " is not adapted");
    }
}

OperatorProcess OperatorProcess::zero(const ModeGrid& grid, NormMode mode)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    return OperatorProcess(grid,
                           std::vector<Mat>(static_cast<size_t>(grid.n_steps()),
                                            Mat::Zero(dim, dim)),
                           mode, false);
}

OperatorProcess OperatorProcess::identity(const ModeGrid& grid, NormMode mode)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    std::vector<Mat> vals;
    vals.reserve(static_cast<size_t>(grid.n_steps()));
    // the identity of L^2(C_{t_k}) is the compression of I
    for (int k = 0; k < grid.n_steps(); ++k)
        vals.push_back(conditional_expectation(Mat(Mat::Identity(dim, dim)), k));
    return OperatorProcess(grid, std::move(vals), mode, false);
}

double OperatorProcess::l2_hs_norm() const
{
    double s = 0.0;
    for (int k = 0; k < n_steps(); ++k)
        s += at(k).squaredNorm() * grid_->dt(k);
    return std::sqrt(s);
}

double OperatorProcess::l1_op_norm() const
{
    double s = 0.0;
    for (int k = 0; k < n_steps(); ++k)
        s += op_norm(at(k)) * grid_->dt(k);
    return s;
}

namespace {

void check_range(int from, int to, int n)
{
    if (from < 0 || to > n || from > to)
        throw std::out_of_range("stochastic integral: bad step range");
}

} // namespace

Vec left_ito_integral(const VectorProcess& phi, int from, int to)
{
    check_range(from, to, phi.n_steps());
    Vec acc = Vec::Zero(Eigen::Index{1} << phi.grid().n_modes());
    for (int k = from; k < to; ++k)
        acc += clifford_mul(phi.at(k), brownian_increment_word(phi.grid(), k));
    return acc;
}

Vec right_ito_integral(const VectorProcess& gamma, int from, int to)
{
    check_range(from, to, gamma.n_steps());
    Vec acc = Vec::Zero(Eigen::Index{1} << gamma.grid().n_modes());
    for (int k = from; k < to; ++k)
        acc += clifford_mul(brownian_increment_word(gamma.grid(), k), gamma.at(k));
    return acc;
}

Mat hs_ito_integral(const OperatorProcess& phi, int from, int to)
{
    check_range(from, to, phi.n_steps());
    const Eigen::Index dim = Eigen::Index{1} << phi.grid().n_modes();
    Mat acc = Mat::Zero(dim, dim);
    for (int k = from; k < to; ++k)
        acc += phi.at(k) * left_mul_matrix(brownian_increment_word(phi.grid(), k));
    return acc;
}

Mat hs_ito_integral_left(const OperatorProcess& phi, int from, int to)
{
    check_range(from, to, phi.n_steps());
    const Eigen::Index dim = Eigen::Index{1} << phi.grid().n_modes();
    Mat acc = Mat::Zero(dim, dim);
    for (int k = from; k < to; ++k)
        acc += left_mul_matrix(brownian_increment_word(phi.grid(), k)) * phi.at(k);
    return acc;
}

IsometryReport vector_isometry_check(const VectorProcess& phi, bool right_sided)
{
    IsometryReport r;
    const Vec integral = right_sided ? right_ito_integral(phi, 0, phi.n_steps())
                                     : left_ito_integral(phi, 0, phi.n_steps());
    r.lhs = integral.squaredNorm();
    for (int k = 0; k < phi.n_steps(); ++k)
        r.rhs += phi.at(k).squaredNorm() * phi.grid().dt(k);
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.rel_error = scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
    return r;
}

IsometryReport hs_isometry_check(const OperatorProcess& phi)
{
    IsometryReport r;
    r.lhs = hs_ito_integral(phi, 0, phi.n_steps()).squaredNorm();
    for (int k = 0; k < phi.n_steps(); ++k)
        r.rhs += phi.at(k).squaredNorm() * phi.grid().dt(k);
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.rel_error = scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
    return r;
}

OperatorProcess adapted_projection(const ModeGrid& grid, const std::vector<Mat>& raw,
                                   NormMode mode)
{
    if (static_cast<int>(raw.size()) != grid.n_steps())
        throw std::invalid_argument("adapted_projection: one value per grid step required");
    std::vector<Mat> vals;
    vals.reserve(raw.size());
    for (int k = 0; k < grid.n_steps(); ++k)
        vals.push_back(conditional_expectation(raw[static_cast<size_t>(k)], k));
    return OperatorProcess(grid, std::move(vals), mode, false);
}

cplx duality_pairing(const OperatorProcess& p, const OperatorProcess& f)
{
    if (!(p.grid() == f.grid()))
        throw std::invalid_argument("duality_pairing: grid mismatch");
    cplx s = 0.0;
    for (int k = 0; k < p.n_steps(); ++k)
        s += (p.at(k).adjoint() * f.at(k)).trace() * p.grid().dt(k);
    return s;
}

cplx duality_pairing(const VectorProcess& p, const VectorProcess& f)
{
    if (!(p.grid() == f.grid()))
        throw std::invalid_argument("duality_pairing: grid mismatch");
    cplx s = 0.0;
    for (int k = 0; k < p.n_steps(); ++k)
        s += p.at(k).dot(f.at(k)) * p.grid().dt(k);
    return s;
}

} // namespace qsc
