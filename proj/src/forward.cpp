#include "qsc/forward.hpp"

#include <cmath>
#include <string>

namespace qsc {

LinearCoefficients LinearCoefficients::zero(const ModeGrid& grid)
{
    return {OperatorProcess::zero(grid, NormMode::Operator),
            OperatorProcess::zero(grid, NormMode::Operator)};
}

double LinearCoefficients::gronwall_weight(int k) const
{
    const double nd = op_norm(D.at(k));
    const double nf = op_norm(F.at(k));
    return nd * nd + nf * nf;
}

VectorProcess Path::as_process() const
{
    std::vector<Vec> vals(x.begin(), x.end() - 1);
    return VectorProcess(*grid, std::move(vals));
}

double Path::sup_norm() const
{
    double s = 0.0;
    for (const Vec& v : x)
        s = std::max(s, v.norm());
    return s;
}

OperatorProcess OperatorPath::as_process() const
{
    std::vector<Mat> vals(x.begin(), x.end() - 1);
    return OperatorProcess(*grid, std::move(vals));
}

double OperatorPath::sup_hs_norm() const
{
    double s = 0.0;
    for (const Mat& m : x)
        s = std::max(s, m.norm());
    return s;
}

namespace {

Vec euler_step(const Vec& x, const VectorProcess& u, const VectorProcess& v,
               const LinearCoefficients& coeffs, int k)
{
    const ModeGrid& grid = u.grid();
    const Vec drift = coeffs.D.at(k) * x + u.at(k);
    const Vec diff = coeffs.F.at(k) * x + v.at(k);
    return x + drift * grid.dt(k) + clifford_mul(diff, brownian_increment_word(grid, k));
}

} // namespace

Path solve_linear(const Vec& xi, const VectorProcess& u, const VectorProcess& v,
                  const LinearCoefficients& coeffs, int t0, const SchemeOptions& scheme)
{
    const ModeGrid& grid = u.grid();
    const int n = grid.n_steps();
    if (t0 < 0 || t0 > n)
        throw std::out_of_range("solve_linear: initial step out of range");
    if (!is_adapted(xi, t0))
        throw AdaptednessError("solve_linear: initial datum not adapted to t0");

    Path path;
    path.grid = &grid;
    path.t0 = t0;
    path.x.assign(static_cast<size_t>(n) + 1, xi);

    if (scheme.kind == SchemeOptions::Kind::Euler) {
        for (int k = t0; k < n; ++k)
            path.x[static_cast<size_t>(k) + 1] = euler_step(path.at(k), u, v, coeffs, k);
        return path;
    }

    // Picard iteration on the integral form; the discrete map is a contraction
    // once dt * M_{D,F,2} is small (Gronwall).
    double residual = 0.0;
    for (int it = 0; it < scheme.max_iterations; ++it) {
        std::vector<Vec> next = path.x;
        Vec acc = xi;
        for (int k = t0; k < n; ++k) {
            const Vec drift = coeffs.D.at(k) * path.at(k) + u.at(k);
            const Vec diff = coeffs.F.at(k) * path.at(k) + v.at(k);
            acc += drift * grid.dt(k) + clifford_mul(diff, brownian_increment_word(grid, k));
            next[static_cast<size_t>(k) + 1] = acc;
        }
        residual = 0.0;
        for (size_t j = 0; j <= static_cast<size_t>(n); ++j)
            residual = std::max(residual, (next[j] - path.x[j]).norm());
        path.x = std::move(next);
        if (residual <= scheme.tolerance)
            return path;
    }
    throw PicardDivergence("solve_linear: Picard iteration did not converge, residual " +
                               std::to_string(residual),
                           residual);
}

InitialFlow flow_U(const LinearCoefficients& coeffs, int t0, const SchemeOptions& scheme)
{
    const ModeGrid& grid = coeffs.D.grid();
    const int n = grid.n_steps();
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    InitialFlow flow;
    flow.grid = &grid;
    flow.t0 = t0;
    flow.at.assign(static_cast<size_t>(n) + 1, Mat::Zero(dim, dim));

    const VectorProcess zero = VectorProcess::zero(grid);
    const uint32_t mask = (t0 >= 32) ? ~0u : ((1u << t0) - 1u);
    for (Eigen::Index s = 0; s < dim; ++s) {
        if (static_cast<uint32_t>(s) & ~mask)
            continue;
        Vec xi = Vec::Zero(dim);
        xi(s) = 1.0;
        const Path sol = solve_linear(xi, zero, zero, coeffs, t0, scheme);
        for (int j = 0; j <= n; ++j)
            flow.at[static_cast<size_t>(j)].col(s) = sol.at(j);
    }
    return flow;
}

namespace {

SourceFlow flow_from_sources(const LinearCoefficients& coeffs, int t0,
                             const SchemeOptions& scheme, bool diffusion_slot)
{
    const ModeGrid& grid = coeffs.D.grid();
    const int n = grid.n_steps();
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    const Eigen::Index cols = (n - t0) * dim;

    SourceFlow flow;
    flow.grid = &grid;
    flow.t0 = t0;
    flow.at.assign(static_cast<size_t>(n) + 1, Mat::Zero(dim, cols));

    const Vec zero_xi = Vec::Zero(dim);
    for (int k = t0; k < n; ++k) {
        const uint32_t mask = (k >= 32) ? ~0u : ((1u << k) - 1u);
        for (Eigen::Index s = 0; s < dim; ++s) {
            if (static_cast<uint32_t>(s) & ~mask)
                continue; // a unit source here would not be adapted
            VectorProcess src = VectorProcess::zero(grid);
            src.at(k)(s) = 1.0;
            const Path sol = diffusion_slot
                                 ? solve_linear(zero_xi, VectorProcess::zero(grid), src,
                                                coeffs, t0, scheme)
                                 : solve_linear(zero_xi, src, VectorProcess::zero(grid),
                                                coeffs, t0, scheme);
            const Eigen::Index col = (k - t0) * dim + s;
            for (int j = 0; j <= n; ++j)
                flow.at[static_cast<size_t>(j)].col(col) = sol.at(j);
        }
    }
    return flow;
}

} // namespace

SourceFlow flow_V(const LinearCoefficients& coeffs, int t0, const SchemeOptions& scheme)
{
    return flow_from_sources(coeffs, t0, scheme, false);
}

SourceFlow flow_Xi(const LinearCoefficients& coeffs, int t0, const SchemeOptions& scheme)
{
    return flow_from_sources(coeffs, t0, scheme, true);
}

double flow_shift_modulus(const LinearCoefficients& coeffs, int t0, int t, const Vec& xi,
                          const SchemeOptions& scheme)
{
    if (t < t0)
        throw std::out_of_range("flow_shift_modulus: t must not precede t0");
    if (!is_adapted(xi, t0))
        throw AdaptednessError("flow_shift_modulus: probe not adapted to t0");
    const InitialFlow u0 = flow_U(coeffs, t0, scheme);
    const InitialFlow ut = flow_U(coeffs, t, scheme);
    double sup = 0.0;
    for (int r = t; r < static_cast<int>(u0.at.size()); ++r)
        sup = std::max(sup, ((ut.at[static_cast<size_t>(r)] - u0.at[static_cast<size_t>(r)]) * xi).norm());
    return sup;
}

Path solve_general(const GeneralSystemSpec& spec, const Vec& x0, const ModeGrid& grid, int t0)
{
    const int n = grid.n_steps();
    if (!is_adapted(x0, t0))
        throw AdaptednessError("solve_general: initial datum not adapted to t0");
    Path path;
    path.grid = &grid;
    path.t0 = t0;
    path.x.assign(static_cast<size_t>(n) + 1, x0);
    for (int k = t0; k < n; ++k) {
        const Vec& x = path.at(k);
        const Vec d = spec.drift(k, x);
        const Vec f = spec.left_diffusion(k, x);
        const Vec g = spec.right_diffusion(k, x);
        if (!is_adapted(d, k) || !is_adapted(f, k) || !is_adapted(g, k))
            throw AdaptednessError("solve_general: coefficient callback returned a value not "
                                   "adapted at step " +
                                   std::to_string(k));
        const Vec w = brownian_increment_word(grid, k);
        path.x[static_cast<size_t>(k) + 1] =
            x + d * grid.dt(k) + clifford_mul(f, w) + clifford_mul(w, g);
    }
    return path;
}

OperatorPath solve_hs_forward(const Mat& x0, const OperatorProcess& z, const OperatorProcess& w,
                              int t0)
{
    const ModeGrid& grid = z.grid();
    const int n = grid.n_steps();
    if (!is_adapted(x0, t0))
        throw AdaptednessError("solve_hs_forward: initial datum not adapted to t0");
    OperatorPath path;
    path.grid = &grid;
    path.t0 = t0;
    path.x.assign(static_cast<size_t>(n) + 1, x0);
    for (int k = t0; k < n; ++k) {
        path.x[static_cast<size_t>(k) + 1] =
            path.at(k) + z.at(k) * grid.dt(k) +
            w.at(k) * left_mul_matrix(brownian_increment_word(grid, k));
    }
    return path;
}

Vec AnchorSpace::stack(const VectorProcess& p) const
{
    Vec out = Vec::Zero(dim());
    for (int k = t0; k < grid->n_steps(); ++k)
        out.segment((k - t0) * block_dim(), block_dim()) = p.at(k);
    return out;
}

VectorProcess AnchorSpace::unstack(const Vec& stacked, bool check) const
{
    std::vector<Vec> vals(static_cast<size_t>(grid->n_steps()), Vec::Zero(block_dim()));
    for (int k = t0; k < grid->n_steps(); ++k)
        vals[static_cast<size_t>(k)] = stacked.segment((k - t0) * block_dim(), block_dim());
    return VectorProcess(*grid, std::move(vals), check);
}

Vec AnchorSpace::weights() const
{
    Vec w = Vec::Zero(dim());
    for (int k = t0; k < grid->n_steps(); ++k)
        w.segment((k - t0) * block_dim(), block_dim()).setConstant(grid->dt(k));
    return w;
}

cplx AnchorSpace::pairing(const Vec& a, const Vec& b) const
{
    const Vec w = weights();
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        s += std::conj(a(i)) * w(i).real() * b(i);
    return s;
}

Mat AnchorSpace::weighted_adjoint(const Mat& a) const
{
    const Vec w = weights();
    Mat out(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            out(i, j) = std::conj(a(j, i)) * w(j).real() / w(i).real();
    return out;
}

Mat AnchorSpace::adapted_projector() const
{
    Mat p = Mat::Zero(dim(), dim());
    for (int k = t0; k < grid->n_steps(); ++k) {
        const uint32_t mask = (k >= 32) ? ~0u : ((1u << k) - 1u);
        for (Eigen::Index s = 0; s < block_dim(); ++s)
            if (!(static_cast<uint32_t>(s) & ~mask)) {
                const Eigen::Index i = (k - t0) * block_dim() + s;
                p(i, i) = 1.0;
            }
    }
    return p;
}

} // namespace qsc
