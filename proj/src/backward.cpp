#include "qsc/backward.hpp"

#include <cmath>
#include <string>

namespace qsc {

AdjointData AdjointData::zero(const ModeGrid& grid)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    return {Mat::Zero(dim, dim), OperatorProcess::zero(grid),
            LinearCoefficients::zero(grid)};
}

double TranspositionSolution::sup_op_norm() const
{
    double s = 0.0;
    for (const Mat& p : P)
        s = std::max(s, op_norm(p));
    return s;
}

double TranspositionSolution::residual_l1(const ModeGrid& g) const
{
    double s = 0.0;
    for (int k = 0; k < g.n_steps(); ++k)
        s += residual[static_cast<size_t>(k)] * g.dt(k);
    return s;
}

Mat representation_P(const AdjointData& data, int t0, const SchemeOptions& scheme)
{
    const ModeGrid& grid = data.H.grid();
    const int n = grid.n_steps();
    const InitialFlow u = flow_U(data.coeffs, t0, scheme);
    Mat acc = u.at.back().adjoint() * data.P_T * u.at.back();
    for (int k = t0; k < n; ++k) {
        const Mat& uk = u.at[static_cast<size_t>(k)];
        acc -= uk.adjoint() * data.H.at(k) * uk * grid.dt(k);
    }
    return conditional_expectation(acc, t0);
}

namespace {

// least-squares extraction of (P_k, Q_k, residual) from M ~ P_k + Q_k L_{dW_k};
// exact on the representable component because (dW_k)^2 = dt_k I
struct StepDecomposition {
    Mat p;
    Mat q;
    double residual;
};

StepDecomposition decompose_step(const ModeGrid& grid, int k, const Mat& m)
{
    StepDecomposition d;
    const Mat ldw = left_mul_matrix(brownian_increment_word(grid, k));
    d.p = conditional_expectation(m, k);
    d.q = conditional_expectation(Mat((m - d.p) * ldw), k) / grid.dt(k);
    d.residual = (m - d.p - d.q * ldw).norm();
    return d;
}

Mat driver(const AdjointData& data, const Mat& parity, int k, const Mat& p, const Mat& q)
{
    const Mat& d = data.coeffs.D.at(k);
    const Mat& f = data.coeffs.F.at(k);
    return -p * d - d.adjoint() * p - f.adjoint() * q * parity - q * parity * f -
           f.adjoint() * p * f + data.H.at(k);
}

} // namespace

TranspositionSolution solve_linear_bqsde(const Mat& p_terminal, const OperatorProcess& g)
{
    const ModeGrid& grid = g.grid();
    const int n = grid.n_steps();
    TranspositionSolution sol;
    sol.grid = &grid;
    sol.P.assign(static_cast<size_t>(n) + 1, p_terminal);
    sol.Q = OperatorProcess::zero(grid);
    sol.residual.assign(static_cast<size_t>(n), 0.0);
    for (int k = n - 1; k >= 0; --k) {
        const Mat m = sol.P[static_cast<size_t>(k) + 1] - g.at(k) * grid.dt(k);
        StepDecomposition d = decompose_step(grid, k, m);
        sol.P[static_cast<size_t>(k)] = std::move(d.p);
        sol.Q.at(k) = std::move(d.q);
        sol.residual[static_cast<size_t>(k)] = d.residual;
    }
    return sol;
}

TranspositionSolution solve_adjoint_bqsde(const AdjointData& data, DriverMode mode,
                                          int max_iterations, double tolerance)
{
    const ModeGrid& grid = data.H.grid();
    const int n = grid.n_steps();
    const Mat parity = parity_op(grid.n_modes());
    TranspositionSolution sol;
    sol.grid = &grid;
    sol.P.assign(static_cast<size_t>(n) + 1, data.P_T);
    sol.Q = OperatorProcess::zero(grid);
    sol.residual.assign(static_cast<size_t>(n), 0.0);

    for (int k = n - 1; k >= 0; --k) {
        const Mat& pnext = sol.P[static_cast<size_t>(k) + 1];
        Mat p;
        Mat q;
        Mat m;
        if (mode == DriverMode::Explicit) {
            // evaluate the driver at the terminal-side pair
            const StepDecomposition mart = decompose_step(grid, k, pnext);
            m = pnext - driver(data, parity, k, pnext, mart.q) * grid.dt(k);
            StepDecomposition d = decompose_step(grid, k, m);
            p = std::move(d.p);
            q = std::move(d.q);
        } else {
            p = conditional_expectation(pnext, k);
            q = Mat::Zero(p.rows(), p.cols());
            bool converged = false;
            for (int it = 0; it < max_iterations; ++it) {
                m = pnext - driver(data, parity, k, p, q) * grid.dt(k);
                StepDecomposition d = decompose_step(grid, k, m);
                const double delta =
                    std::max((d.p - p).norm(), (d.q - q).norm() * std::sqrt(grid.dt(k)));
                p = std::move(d.p);
                q = std::move(d.q);
                if (delta <= tolerance * std::max(1.0, p.norm())) {
                    converged = true;
                    break;
                }
            }
            if (!converged) {
                const double lip = 2.0 * op_norm(data.coeffs.D.at(k)) +
                                   2.0 * op_norm(data.coeffs.F.at(k)) +
                                   op_norm(data.coeffs.F.at(k)) * op_norm(data.coeffs.F.at(k));
                const int suggested =
                    std::max(2 * n, static_cast<int>(std::ceil(4.0 * lip * grid.horizon())));
                throw StepContractionError(
                    "solve_adjoint_bqsde: per-step fixed point did not contract at step " +
                        std::to_string(k) + "; refine the grid",
                    suggested);
            }
            m = pnext - driver(data, parity, k, p, q) * grid.dt(k);
        }
        sol.P[static_cast<size_t>(k)] = p;
        sol.residual[static_cast<size_t>(k)] =
            (m - p - q * left_mul_matrix(brownian_increment_word(grid, k))).norm();
        sol.Q.at(k) = std::move(q);
    }
    return sol;
}

AdjointData galerkin_truncate(const AdjointData& data, int rank)
{
    const ModeGrid& grid = data.H.grid();
    const Eigen::Index dim = data.P_T.rows();
    const Eigen::Index r = std::min<Eigen::Index>(std::max(rank, 0), dim);
    Mat gamma = Mat::Zero(dim, dim);
    for (Eigen::Index j = 0; j < r; ++j)
        gamma(j, j) = 1.0;
    AdjointData out = data;
    out.P_T = gamma * data.P_T;
    std::vector<Mat> h;
    h.reserve(static_cast<size_t>(grid.n_steps()));
    for (int k = 0; k < grid.n_steps(); ++k)
        h.push_back(gamma * data.H.at(k));
    out.H = OperatorProcess(grid, std::move(h), data.H.mode());
    return out;
}

std::vector<GalerkinRow> galerkin_convergence_study(const AdjointData& data,
                                                    const std::vector<int>& ranks, int t0,
                                                    const std::vector<Vec>& probes,
                                                    DriverMode mode)
{
    const ModeGrid& grid = data.H.grid();
    const int n = grid.n_steps();
    const TranspositionSolution ref = solve_adjoint_bqsde(data, mode);
    std::vector<GalerkinRow> rows;
    rows.reserve(ranks.size());
    for (int r : ranks) {
        const TranspositionSolution sol = solve_adjoint_bqsde(galerkin_truncate(data, r), mode);
        double err = 0.0;
        for (const Vec& xi : probes)
            for (int j = t0; j <= n; ++j)
                err = std::max(err, ((sol.at(j) - ref.at(j)) * xi).norm());
        rows.push_back({r, err});
    }
    return rows;
}

namespace {

Mat blockdiag(const AnchorSpace& sp, const std::vector<Mat>& blocks)
{
    Mat out = Mat::Zero(sp.dim(), sp.dim());
    for (int k = sp.t0; k < sp.grid->n_steps(); ++k) {
        const Eigen::Index off = (k - sp.t0) * sp.block_dim();
        out.block(off, off, sp.block_dim(), sp.block_dim()) =
            blocks[static_cast<size_t>(k)];
    }
    return out;
}

Mat row_scale(const Vec& w, const Mat& a)
{
    Mat out = a;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        out.row(i) *= w(i).real();
    return out;
}

Mat row_scale_inv(const Vec& w, const Mat& a)
{
    Mat out = a;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        out.row(i) /= w(i).real();
    return out;
}

} // namespace

const RelaxedBlocks& RelaxedSolution::blocks(int t0) const
{
    auto it = anchors.find(t0);
    if (it == anchors.end())
        throw std::out_of_range("RelaxedSolution: anchor " + std::to_string(t0) +
                                " was not assembled");
    return it->second;
}

RelaxedSolution assemble_relaxed(const AdjointData& data, const TranspositionSolution& sol,
                                 const std::vector<int>& anchors, Q3Route route,
                                 const SchemeOptions& scheme)
{
    const ModeGrid& grid = data.H.grid();
    const int n = grid.n_steps();
    const Mat parity = parity_op(grid.n_modes());

    RelaxedSolution out;
    out.grid = &grid;
    out.base = sol;

    for (int t0 : anchors) {
        if (t0 < 0 || t0 >= n)
            throw std::out_of_range("assemble_relaxed: anchor out of range");
        RelaxedBlocks b;
        b.space = AnchorSpace{&grid, t0};
        const AnchorSpace& sp = b.space;
        const Vec w = sp.weights();

        const InitialFlow fu = flow_U(data.coeffs, t0, scheme);
        const SourceFlow fv = flow_V(data.coeffs, t0, scheme);
        const SourceFlow fx = flow_Xi(data.coeffs, t0, scheme);

        b.Q1 = Mat::Zero(sp.dim(), sp.block_dim());
        b.Q1hat = Mat::Zero(sp.dim(), sp.block_dim());
        b.Q2 = Mat::Zero(sp.dim(), sp.dim());
        b.Q2hat = Mat::Zero(sp.dim(), sp.dim());
        Mat xs = Mat::Zero(sp.dim(), sp.dim()); // stacked diffusion-source flow
        std::vector<Mat> qy(static_cast<size_t>(n)), p_blocks(static_cast<size_t>(n)),
            pf_blocks(static_cast<size_t>(n)), f_blocks(static_cast<size_t>(n)),
            h_blocks(static_cast<size_t>(n));
        for (int k = t0; k < n; ++k) {
            qy[static_cast<size_t>(k)] = sol.Q.at(k) * parity;
            p_blocks[static_cast<size_t>(k)] = sol.at(k);
            pf_blocks[static_cast<size_t>(k)] = sol.at(k) * data.coeffs.F.at(k);
            f_blocks[static_cast<size_t>(k)] = data.coeffs.F.at(k);
            h_blocks[static_cast<size_t>(k)] = data.H.at(k);
            const Eigen::Index off = (k - t0) * sp.block_dim();
            const Mat qhat = parity * sol.Q.at(k).adjoint();
            b.Q1.block(off, 0, sp.block_dim(), sp.block_dim()) =
                qy[static_cast<size_t>(k)] * fu.at[static_cast<size_t>(k)];
            b.Q1hat.block(off, 0, sp.block_dim(), sp.block_dim()) =
                qhat * fu.at[static_cast<size_t>(k)];
            b.Q2.block(off, 0, sp.block_dim(), sp.dim()) =
                qy[static_cast<size_t>(k)] * fv.at[static_cast<size_t>(k)];
            b.Q2hat.block(off, 0, sp.block_dim(), sp.dim()) =
                qhat * fv.at[static_cast<size_t>(k)];
            xs.block(off, 0, sp.block_dim(), sp.dim()) = fx.at[static_cast<size_t>(k)];
        }

        const Mat proj = sp.adapted_projector();
        const Mat bd_qy = blockdiag(sp, qy);
        // B(v1,v2) = v2^+ G v1, v-slots restricted to the adapted subspace;
        // G from the Q-route ...
        b.gram_direct = proj *
                        Mat(xs.adjoint() * row_scale(w, bd_qy).adjoint() +
                            bd_qy.adjoint() * row_scale(w, xs)) *
                        proj;
        // ... and from the duality route through (P, P_T, H)
        const Mat& xt = fx.at.back();
        const Mat bd_p = blockdiag(sp, p_blocks);
        b.gram_duality =
            proj *
            Mat(xt.adjoint() * data.P_T.adjoint() * xt -
                xs.adjoint() * row_scale(w, blockdiag(sp, h_blocks)).adjoint() * xs -
                xs.adjoint() * blockdiag(sp, pf_blocks).adjoint() * Mat(w.asDiagonal()) -
                bd_p.adjoint() * row_scale(w, Mat(blockdiag(sp, f_blocks) * xs +
                                                  Mat::Identity(sp.dim(), sp.dim())))) *
            proj;
        {
            const double scale = std::max(b.gram_direct.norm(), b.gram_duality.norm());
            b.gram_discrepancy =
                scale > 0.0 ? (b.gram_direct - b.gram_duality).norm() / scale : 0.0;
        }

        const Mat& gram = (route == Q3Route::Direct) ? b.gram_direct : b.gram_duality;
        const Mat qhat3 = proj * row_scale_inv(w, gram.adjoint()) * proj;
        b.Q3 = 0.5 * qhat3;
        b.Q3star = proj * sp.weighted_adjoint(b.Q3) * proj;

        out.anchors.emplace(t0, std::move(b));
    }
    return out;
}

VectorProcess relaxed_apply(const RelaxedSolution& r, int t0, const Vec& xi,
                            const VectorProcess& u, const VectorProcess& v)
{
    const RelaxedBlocks& b = r.blocks(t0);
    if (!is_adapted(xi, t0))
        throw AdaptednessError("relaxed_apply: xi not adapted to the anchor");
    const Vec stacked = b.Q1 * xi + b.Q2 * b.space.stack(u) + b.Q3 * b.space.stack(v);
    return b.space.unstack(stacked, false);
}

VectorProcess relaxed_apply_hat(const RelaxedSolution& r, int t0, const Vec& xi,
                                const VectorProcess& u, const VectorProcess& v)
{
    const RelaxedBlocks& b = r.blocks(t0);
    if (!is_adapted(xi, t0))
        throw AdaptednessError("relaxed_apply_hat: xi not adapted to the anchor");
    const Vec stacked = b.Q1hat * xi + b.Q2hat * b.space.stack(u) + b.Q3star * b.space.stack(v);
    return b.space.unstack(stacked, false);
}

double apriori_ratio(const AdjointData& data, const RelaxedSolution& r)
{
    double numerator = r.base.sup_op_norm();
    for (const auto& [t0, b] : r.anchors) {
        const Vec w = b.space.weights();
        Vec sqw = w;
        for (Eigen::Index i = 0; i < sqw.size(); ++i)
            sqw(i) = std::sqrt(sqw(i).real());
        double block_norm = std::max(op_norm(row_scale(sqw, b.Q1)),
                                     op_norm(row_scale(sqw, b.Q1hat)));
        const Mat sim_q2 = row_scale(sqw, row_scale_inv(sqw, b.Q2.transpose()).transpose());
        const Mat sim_q2h = row_scale(sqw, row_scale_inv(sqw, b.Q2hat.transpose()).transpose());
        const Mat sim_q3 = row_scale(sqw, row_scale_inv(sqw, b.Q3.transpose()).transpose());
        const Mat sim_q3s = row_scale(sqw, row_scale_inv(sqw, b.Q3star.transpose()).transpose());
        block_norm = std::max({block_norm, op_norm(sim_q2), op_norm(sim_q2h), op_norm(sim_q3),
                               op_norm(sim_q3s)});
        numerator = std::max(numerator, block_norm);
    }
    const double denominator = op_norm(data.P_T) + data.H.l1_op_norm();
    return denominator > 0.0 ? numerator / denominator : 0.0;
}

} // namespace qsc
