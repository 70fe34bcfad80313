#include "qsc/identities.hpp"
#include "qsc/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsc {

IdentityReport IdentityReport::make(std::string name, cplx lhs, cplx rhs, double tolerance)
{
    IdentityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tolerance;
    r.abs_error = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.rel_error = scale > 0.0 ? r.abs_error / scale : 0.0;
    r.pass = r.abs_error <= tolerance * std::max(1.0, scale);
    return r;
}

IdentityReport IdentityReport::defect(std::string name, double defect, double scale,
                                      double tolerance)
{
    IdentityReport r;
    r.name = std::move(name);
    r.lhs = defect;
    r.rhs = 0.0;
    r.tolerance = tolerance;
    r.abs_error = defect;
    r.rel_error = scale > 0.0 ? defect / scale : defect;
    r.pass = r.abs_error <= tolerance * std::max(1.0, scale);
    return r;
}

namespace {

// the five P-terms shared by the transposition and relaxed identities,
// left-endpoint quadrature
cplx p_side_terms(const TranspositionSolution& sol, const AdjointData& data, int t0,
                  const Path& x1, const Path& x2, const ProbeTuple& p1, const ProbeTuple& p2)
{
    const ModeGrid& grid = data.H.grid();
    cplx acc = Vec(sol.at(t0) * p2.xi).dot(p1.xi);
    for (int k = t0; k < grid.n_steps(); ++k) {
        const Mat& p = sol.at(k);
        const Mat& f = data.coeffs.F.at(k);
        const double dt = grid.dt(k);
        acc += Vec(p * p2.u.at(k)).dot(x1.at(k)) * dt;
        acc += Vec(p * x2.at(k)).dot(p1.u.at(k)) * dt;
        acc += Vec(p * f * x2.at(k)).dot(p1.v.at(k)) * dt;
        acc += Vec(p * p2.v.at(k)).dot(Vec(f * x1.at(k) + p1.v.at(k))) * dt;
    }
    return acc;
}

cplx terminal_side(const AdjointData& data, int t0, const Path& x1, const Path& x2)
{
    const ModeGrid& grid = data.H.grid();
    cplx acc = Vec(data.P_T * x2.terminal()).dot(x1.terminal());
    for (int k = t0; k < grid.n_steps(); ++k)
        acc -= Vec(data.H.at(k) * x2.at(k)).dot(x1.at(k)) * grid.dt(k);
    return acc;
}

} // namespace

IdentityReport check_transposition_identity(const TranspositionSolution& sol,
                                            const AdjointData& data, int t0,
                                            const ProbeTuple& p1, const ProbeTuple& p2,
                                            double tolerance, const SchemeOptions& scheme)
{
    const ModeGrid& grid = data.H.grid();
    const Path x1 = solve_linear(p1.xi, p1.u, p1.v, data.coeffs, t0, scheme);
    const Path x2 = solve_linear(p2.xi, p2.u, p2.v, data.coeffs, t0, scheme);

    const cplx lhs = terminal_side(data, t0, x1, x2);
    cplx rhs = p_side_terms(sol, data, t0, x1, x2, p1, p2);
    for (int k = t0; k < grid.n_steps(); ++k) {
        const Mat& q = sol.Q.at(k);
        const double dt = grid.dt(k);
        rhs += Vec(q * parity_apply(p2.v.at(k))).dot(x1.at(k)) * dt;
        rhs += Vec(q * parity_apply(x2.at(k))).dot(p1.v.at(k)) * dt;
    }
    return IdentityReport::make("transposition", lhs, rhs, tolerance);
}

IdentityReport check_relaxed_identity(const RelaxedSolution& r, const AdjointData& data,
                                      int t0, const ProbeTuple& p1, const ProbeTuple& p2,
                                      double tolerance, const SchemeOptions& scheme)
{
    const ModeGrid& grid = data.H.grid();
    const Path x1 = solve_linear(p1.xi, p1.u, p1.v, data.coeffs, t0, scheme);
    const Path x2 = solve_linear(p2.xi, p2.u, p2.v, data.coeffs, t0, scheme);

    const cplx lhs = terminal_side(data, t0, x1, x2);
    cplx rhs = p_side_terms(r.base, data, t0, x1, x2, p1, p2);

    const VectorProcess qv = relaxed_apply(r, t0, p2.xi, p2.u, p2.v);
    const VectorProcess qhat = relaxed_apply_hat(r, t0, p1.xi, p1.u, p1.v);
    for (int k = t0; k < grid.n_steps(); ++k) {
        const double dt = grid.dt(k);
        rhs += qv.at(k).dot(p1.v.at(k)) * dt;
        rhs += p2.v.at(k).dot(qhat.at(k)) * dt;
    }
    return IdentityReport::make("relaxed-transposition", lhs, rhs, tolerance);
}

IdentityReport check_linear_duality(const TranspositionSolution& sol, const Mat& p_terminal,
                                    const OperatorProcess& g, const Mat& x0,
                                    const OperatorProcess& z, const OperatorProcess& w,
                                    int t0, double tolerance)
{
    const ModeGrid& grid = g.grid();
    const OperatorPath x = solve_hs_forward(x0, z, w, t0);

    cplx lhs = (p_terminal.adjoint() * x.terminal()).trace();
    cplx rhs = (sol.at(t0).adjoint() * x0).trace();
    for (int k = t0; k < grid.n_steps(); ++k) {
        const double dt = grid.dt(k);
        // right-endpoint sampling of the source pairing matches the backward
        // Euler recursion P_k = E[P_{k+1} - g_k dt | k]; with it the discrete
        // identity holds exactly for every admissible (x0, z, w)
        lhs -= (g.at(k).adjoint() * x.at(k + 1)).trace() * dt;
        rhs += (sol.at(k).adjoint() * z.at(k)).trace() * dt;
        rhs += (sol.Q.at(k).adjoint() * w.at(k)).trace() * dt;
    }
    return IdentityReport::make("linear-duality", lhs, rhs, tolerance);
}

IdentityReport check_rank_one_algebra(const Vec& x1, const Vec& x2, const Mat& d,
                                      const Mat& f, double tolerance)
{
    const Mat t = x1 * x2.adjoint();
    const Mat parity = parity_op(modes_of_dim(x1.size()));
    const double d1 = (Mat(Mat(f * x1) * Mat(f * x2).adjoint()) - f * t * f.adjoint()).norm();
    const double d2 = (Mat(Mat(d * x1) * x2.adjoint() + x1 * Mat(d * x2).adjoint()) -
                       (d * t + t * d.adjoint()))
                          .norm();
    const double d3 = (Mat(x1 * Mat(parity * f * x2).adjoint() +
                           Mat(parity * f * x1) * x2.adjoint()) -
                       (t * f.adjoint() * parity + parity * f * t))
                          .norm();
    const double scale = std::max(1.0, t.norm() * std::max(d.norm(), f.norm()));
    return IdentityReport::defect("rank-one-algebra", std::max({d1, d2, d3}), scale, tolerance);
}

IdentityReport check_rank_one_propagation(const ProbeTuple& p1, const ProbeTuple& p2,
                                          const LinearCoefficients& coeffs, int t0,
                                          double tolerance, const SchemeOptions& scheme)
{
    const ModeGrid& grid = coeffs.D.grid();
    const Path x1 = solve_linear(p1.xi, p1.u, p1.v, coeffs, t0, scheme);
    const Path x2 = solve_linear(p2.xi, p2.u, p2.v, coeffs, t0, scheme);

    // The propagated tensor agrees with the exact product only weakly: the
    // per-step quadratic increment lives in the fresh noise sector while its
    // Ito replacement is adapted, so the two are compared through pairings
    // against algebra elements, where the sector mismatch cancels exactly.
    std::vector<VectorProcess> tests;
    for (uint64_t s : {311u, 312u, 313u})
        tests.push_back(vector_source_preset(grid, "profile", 1.0, s));

    double defect = 0.0;
    double scale = 1.0;
    std::vector<double> weak_sums(tests.size(), 0.0);
    for (int k = t0; k < grid.n_steps(); ++k) {
        const double dt = grid.dt(k);
        const Mat& d = coeffs.D.at(k);
        const Mat& f = coeffs.F.at(k);
        const Vec& a1 = x1.at(k);
        const Vec& a2 = x2.at(k);
        const Vec b1 = f * a1 + p1.v.at(k);
        const Vec b2 = f * a2 + p2.v.at(k);
        const Vec w = brownian_increment_word(grid, k);
        // the step increment and its exact counterpart are sums of rank-one
        // tensors u (x) v; keeping them factored avoids dim^3 work entirely
        struct RankOne {
            Vec u, v;
            cplx c;
        };
        std::vector<RankOne> delta;
        // dt-part of the propagated increment (Ito correction folded in)
        delta.push_back({d * a1, a2, dt});
        delta.push_back({a1, d * a2, dt});
        delta.push_back({f * a1, f * a2, dt});
        delta.push_back({p1.u.at(k), a2, dt});
        delta.push_back({a1, p2.u.at(k), dt});
        delta.push_back({f * a1, p2.v.at(k), dt});
        delta.push_back({p1.v.at(k), f * a2, dt});
        delta.push_back({p1.v.at(k), p2.v.at(k), dt});
        // noise part: a1 (x) (L_w Y b2) and (L_w Y b1) (x) a2, with L_w = L_w^*
        delta.push_back({a1, clifford_mul(w, parity_apply(b2)), 1.0});
        delta.push_back({clifford_mul(w, parity_apply(b1)), a2, 1.0});
        // minus the exact increment x1' (x) x2' - x1 (x) x2
        delta.push_back({x1.at(k + 1), x2.at(k + 1), -1.0});
        delta.push_back({a1, a2, 1.0});
        // increment-by-increment: each step's defect is paired with a test
        // adapted to that step, where the fresh-sector terms cancel exactly
        for (size_t yi = 0; yi < tests.size(); ++yi) {
            // <L_y, u (x) v>_HS = v^* (L_y^* u) = v^* L_{y^*} u
            const Mat ystar = left_mul_matrix(field_conj(tests[yi].at(k)));
            cplx sum = 0.0;
            for (const RankOne& r : delta)
                sum += r.c * Vec(ystar * r.u).dot(r.v);
            weak_sums[yi] += std::abs(sum);
            const cplx ref = Vec(ystar * x1.at(k + 1)).dot(x2.at(k + 1));
            scale = std::max(scale, std::abs(ref));
        }
    }
    for (double w : weak_sums)
        defect = std::max(defect, w);
    return IdentityReport::defect("rank-one-propagation", defect, scale, tolerance);
}

IdentityReport check_trace_dictionary(const OperatorProcess& q, const ProbeTuple& p1,
                                      const ProbeTuple& p2, const LinearCoefficients& coeffs,
                                      int t0, double tolerance, const SchemeOptions& scheme)
{
    const ModeGrid& grid = q.grid();
    const int n = grid.n_steps();
    const Path x1 = solve_linear(p1.xi, p1.u, p1.v, coeffs, t0, scheme);
    const Path x2 = solve_linear(p2.xi, p2.u, p2.v, coeffs, t0, scheme);

    // <P, x1 (x) x2>_HS = <P x2, x1> with P = int Q dW
    const Mat p = hs_ito_integral(q, t0, n);
    const cplx lhs_a = (p.adjoint() * Mat(x1.terminal() * x2.terminal().adjoint())).trace();
    const cplx rhs_a = Vec(p * x2.terminal()).dot(x1.terminal());

    const Eigen::Index dim = p.rows();
    Mat int_beta = Mat::Zero(dim, dim);
    Mat int_gamma = Mat::Zero(dim, dim);
    cplx rhs_b = 0.0;
    cplx rhs_c = 0.0;
    for (int k = t0; k < n; ++k) {
        const double dt = grid.dt(k);
        const Mat& f = coeffs.F.at(k);
        const Vec b1 = f * x1.at(k) + p1.v.at(k);
        const Vec b2 = f * x2.at(k) + p2.v.at(k);
        const Mat ldw = left_mul_matrix(brownian_increment_word(grid, k));
        int_beta += Mat(x1.at(k) * parity_apply(b2).adjoint()) * ldw;
        int_gamma += ldw * Mat(parity_apply(b1) * x2.at(k).adjoint());
        rhs_b += Vec(q.at(k) * parity_apply(b2)).dot(x1.at(k)) * dt;
        rhs_c += Vec(q.at(k) * x2.at(k)).dot(parity_apply(b1)) * dt;
    }
    const Mat int_q = hs_ito_integral(q, t0, n);
    // the gamma-type integral (increment on the left) pairs against the
    // left-multiplied integral of the same density, not the right-multiplied
    // one: the grading sits between the increment and the adapted block
    const Mat int_q_hat = hs_ito_integral_left(q, t0, n);
    const cplx lhs_b = (int_q.adjoint() * int_beta).trace();
    const cplx lhs_c = (int_q_hat.adjoint() * int_gamma).trace();

    IdentityReport r = IdentityReport::make("trace-dictionary", lhs_a + lhs_b + lhs_c,
                                            rhs_a + rhs_b + rhs_c, tolerance);
    r.abs_error = std::max({std::abs(lhs_a - rhs_a), std::abs(lhs_b - rhs_b),
                            std::abs(lhs_c - rhs_c)});
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.rel_error = scale > 0.0 ? r.abs_error / scale : 0.0;
    r.pass = r.abs_error <= tolerance * std::max(1.0, scale);
    return r;
}

double fit_order(const std::vector<double>& dts, const std::vector<double>& errors)
{
    if (dts.size() != errors.size() || dts.size() < 3)
        throw std::invalid_argument("fit_order: need >= 3 (dt, error) samples");
    const size_t m = dts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        const double x = std::log(dts[i]);
        const double y = std::log(std::max(errors[i], 1e-16));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    return (m * sxy - sx * sy) / denom;
}

} // namespace qsc
