#include "qsc/sweeps.hpp"

#include <algorithm>
#include <cmath>

namespace qsc {

bool SweepResult::all_below(double tol) const
{
    for (double e : errors)
        if (e > tol)
            return false;
    return true;
}

bool SweepResult::passes_order(double exact_tol) const
{
    return all_below(exact_tol) || order >= 0.9;
}

void SweepResult::finish() { order = fit_order(dts, errors); }

SweepResult scalar_forward_sweep(const std::vector<int>& levels, double horizon,
                                 double lambda)
{
    SweepResult s;
    for (int lvl : levels) {
        const ModeGrid grid(horizon, lvl);
        const LinearCoefficients coeffs =
            coefficient_pair(grid, "scalar", lambda, "zero", 0.0, 0);
        const Vec xi = Vec::Unit(Eigen::Index{1} << lvl, 0);
        const Path x =
            solve_linear(xi, VectorProcess::zero(grid), VectorProcess::zero(grid), coeffs, 0);
        s.errors.push_back(std::abs(x.terminal()(0) - std::exp(lambda * horizon)));
        s.dts.push_back(horizon / lvl);
    }
    s.finish();
    return s;
}

double scalar_p0_error(int n_steps, double lambda)
{
    const ModeGrid grid(1.0, n_steps);
    AdjointData data = AdjointData::zero(grid);
    data.coeffs.D = coefficient_preset(grid, "scalar", lambda, 0);
    data.P_T = terminal_preset(grid, "identity", 1.0, 0);
    const Mat p0 = representation_P(data, 0);
    return std::abs(p0(0, 0) - std::exp(2.0 * lambda));
}

SweepResult p_consistency_sweep(const std::vector<int>& levels, double horizon,
                                const AdjointPreset& preset, DriverMode mode,
                                const SchemeOptions& scheme)
{
    SweepResult s;
    for (int lvl : levels) {
        const ModeGrid grid(horizon, lvl);
        const AdjointData data = make_adjoint_data(grid, preset);
        const TranspositionSolution sol = solve_adjoint_bqsde(data, mode);
        const double scale = std::max(1.0, sol.sup_op_norm());
        double err = 0.0;
        for (int t0 = 0; t0 < lvl; ++t0) {
            const Mat rep = representation_P(data, t0, scheme);
            const Vec xi = initial_preset(grid, "profile", 1.0, t0, preset.seed + 3);
            err = std::max(err, ((rep - sol.at(t0)) * xi).norm() /
                                    (scale * std::max(1.0, xi.norm())));
        }
        s.errors.push_back(err);
        s.dts.push_back(horizon / lvl);
    }
    s.finish();
    return s;
}

SweepResult duality_defect_sweep(const std::vector<int>& levels, double horizon,
                                 uint64_t seed, int draws)
{
    SweepResult s;
    for (int lvl : levels) {
        const ModeGrid grid(horizon, lvl);
        // the defect is a signed quantity that may cross zero along the
        // refinement for one draw; the max over draws decays at the true rate
        double err = 0.0;
        for (int d = 0; d < draws; ++d) {
            const uint64_t sd = seed + 100 * static_cast<uint64_t>(d);
            const Mat p_term = terminal_preset(grid, "word", 1.0, sd + 1);
            const OperatorProcess g = operator_source_preset(grid, "word", 1.0, sd + 2);
            const TranspositionSolution sol = solve_linear_bqsde(p_term, g);
            const Mat x0 =
                conditional_expectation(terminal_preset(grid, "word", 1.0, sd + 4), 0);
            const OperatorProcess z = operator_source_preset(grid, "word", 1.0, sd + 5);
            const OperatorProcess w = operator_source_preset(grid, "word", 1.0, sd + 6);
            const IdentityReport r =
                check_linear_duality(sol, p_term, g, x0, z, w, 0, 1.0);
            err = std::max(err, r.abs_error / std::max(1.0, std::abs(r.lhs)));
        }
        s.errors.push_back(err);
        s.dts.push_back(horizon / lvl);
    }
    s.finish();
    return s;
}

SweepResult transposition_defect_sweep(const std::vector<int>& levels, double horizon,
                                       const AdjointPreset& preset, int n_probes,
                                       DriverMode mode, const SchemeOptions& scheme)
{
    SweepResult s;
    for (int lvl : levels) {
        const ModeGrid grid(horizon, lvl);
        const AdjointData data = make_adjoint_data(grid, preset);
        const TranspositionSolution sol = solve_adjoint_bqsde(data, mode);
        double sum = 0.0;
        for (int t = 0; t < n_probes; ++t) {
            const uint64_t sd = preset.seed + 1000 * static_cast<uint64_t>(t);
            const ProbeTuple p1 = probe_preset(grid, 0, sd, true);
            const ProbeTuple p2 = probe_preset(grid, 0, sd + 500, true);
            const IdentityReport r =
                check_transposition_identity(sol, data, 0, p1, p2, 1.0, scheme);
            sum += r.abs_error / std::max(1.0, std::abs(r.lhs));
        }
        s.errors.push_back(sum / std::max(1, n_probes));
        s.dts.push_back(horizon / lvl);
    }
    s.finish();
    return s;
}

SweepResult propagation_defect_sweep(const std::vector<int>& levels, double horizon,
                                     uint64_t seed, int n_probes,
                                     const SchemeOptions& scheme)
{
    SweepResult s;
    for (int lvl : levels) {
        const ModeGrid grid(horizon, lvl);
        const LinearCoefficients coeffs =
            coefficient_pair(grid, "random", 0.3, "random", 0.3, seed);
        double sum = 0.0;
        for (int t = 0; t < n_probes; ++t) {
            const uint64_t sd = seed + 1000 * static_cast<uint64_t>(t);
            const ProbeTuple p1 = probe_preset(grid, 0, sd, true);
            const ProbeTuple p2 = probe_preset(grid, 0, sd + 500, true);
            const IdentityReport r =
                check_rank_one_propagation(p1, p2, coeffs, 0, 1.0, scheme);
            sum += r.rel_error;
        }
        s.errors.push_back(sum / std::max(1, n_probes));
        s.dts.push_back(horizon / lvl);
    }
    s.finish();
    return s;
}

RelaxedSweep relaxed_identity_sweep(const std::vector<int>& levels, double horizon,
                                    const AdjointPreset& preset, int probes_per_anchor,
                                    DriverMode mode, const SchemeOptions& scheme)
{
    RelaxedSweep out;
    bool first = true;
    for (int lvl : levels) {
        const ModeGrid grid(horizon, lvl);
        const AdjointData data = make_adjoint_data(grid, preset);
        const TranspositionSolution sol = solve_adjoint_bqsde(data, mode);

        // the order is measured at anchor t0 = 0: that is the one anchor that
        // sits at the same physical time on every level, so the per-level
        // defects are comparable; a mid-grid anchor is added only for the
        // adjoint-condition and Gram checks
        std::vector<int> anchors{0};
        if (lvl / 2 != 0)
            anchors.push_back(lvl / 2);
        const RelaxedSolution rel = assemble_relaxed(data, sol, anchors, Q3Route::Direct,
                                                     scheme);
        const RelaxedSolution rel2 = assemble_relaxed(data, sol, anchors,
                                                      Q3Route::FromDuality, scheme);

        const double ratio = apriori_ratio(data, rel);
        out.apriori_min = first ? ratio : std::min(out.apriori_min, ratio);
        out.apriori_max = first ? ratio : std::max(out.apriori_max, ratio);
        first = false;

        for (int t0 : anchors) {
            const RelaxedBlocks& b = rel.blocks(t0);
            const Mat proj = b.space.adapted_projector();
            out.adjoint_defect = std::max(
                out.adjoint_defect,
                (Mat(proj * b.space.weighted_adjoint(b.Q3) * proj) - b.Q3star).norm());
            out.gram_gap = std::max(out.gram_gap, b.gram_discrepancy);
        }

        const int t0 = 0;
        double tsum = 0.0, rsum = 0.0, usum = 0.0;
        int count = 0;
        for (int t = 0; t < probes_per_anchor; ++t) {
            const uint64_t s = preset.seed + 1000 * static_cast<uint64_t>(t);
            // intrinsic probes are built from fixed trigonometric profiles, so
            // each level samples the same continuum probe; per-cell random
            // draws would change the probe with the level and mask the rate
            const ProbeTuple p1 = probe_preset(grid, t0, s, true);
            const ProbeTuple p2 = probe_preset(grid, t0, s + 500, true);
            const IdentityReport tr =
                check_transposition_identity(sol, data, t0, p1, p2, 1.0, scheme);
            const IdentityReport rr =
                check_relaxed_identity(rel, data, t0, p1, p2, 1.0, scheme);
            const IdentityReport rr2 =
                check_relaxed_identity(rel2, data, t0, p1, p2, 1.0, scheme);
            const double scale = std::max(1.0, std::abs(tr.lhs));
            tsum += tr.abs_error / scale;
            rsum += rr.abs_error / scale;
            usum += std::abs(rr.rhs - rr2.rhs) / scale;
            ++count;
        }
        const double dt = horizon / lvl;
        out.transposition.dts.push_back(dt);
        out.transposition.errors.push_back(tsum / count);
        out.relaxed.dts.push_back(dt);
        out.relaxed.errors.push_back(rsum / count);
        out.uniqueness.dts.push_back(dt);
        out.uniqueness.errors.push_back(usum / count);
    }
    out.transposition.finish();
    out.relaxed.finish();
    out.uniqueness.finish();
    return out;
}

GalerkinResult galerkin_sweep(int n_modes, double horizon, const AdjointPreset& preset,
                              int n_probes, DriverMode mode)
{
    const ModeGrid grid(horizon, n_modes);
    AdjointPreset p = preset;
    p.terminal_name = "dense";
    p.source_name = "dense";
    const AdjointData data = make_adjoint_data(grid, p);
    const Eigen::Index dim = Eigen::Index{1} << n_modes;

    std::vector<int> ranks;
    for (int r = 0; r <= dim; ++r)
        ranks.push_back(r);
    std::vector<Vec> probes;
    for (int t = 0; t < n_probes; ++t)
        probes.push_back(initial_preset(grid, "random", 1.0, n_modes,
                                        preset.seed + 77 + static_cast<uint64_t>(t)));

    GalerkinResult out;
    out.rows = galerkin_convergence_study(data, ranks, 0, probes, mode);
    out.monotone = true;
    for (size_t i = 1; i < out.rows.size(); ++i)
        out.monotone = out.monotone &&
                       out.rows[i].sup_error <= 1.05 * out.rows[i - 1].sup_error + 1e-14;
    out.full_rank_error = out.rows.back().sup_error;
    return out;
}

} // namespace qsc
