#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsc/presets.hpp"
#include "qsc/sweeps.hpp"

using namespace qsc;

TEST_CASE("discrete linear duality holds to machine precision for all data")
{
    for (int lvl : {3, 4, 5}) {
        const ModeGrid grid(1.0, lvl);
        for (uint64_t seed : {2u, 7u, 42u}) {
            const Mat p_term = terminal_preset(grid, "word", 1.0, seed + 1);
            const OperatorProcess g = operator_source_preset(grid, "word", 1.0, seed + 2);
            const TranspositionSolution sol = solve_linear_bqsde(p_term, g);
            const Mat x0 = conditional_expectation(
                terminal_preset(grid, "word", 1.0, seed + 4), 0);
            const OperatorProcess z = operator_source_preset(grid, "word", 1.0, seed + 5);
            const OperatorProcess w = operator_source_preset(grid, "word", 1.0, seed + 6);
            const IdentityReport r =
                check_linear_duality(sol, p_term, g, x0, z, w, 0, 1e-12);
            CHECK(r.pass);
            CHECK(r.abs_error <= 1e-12 * std::max(1.0, std::abs(r.lhs)));
        }
    }
}

TEST_CASE("duality with vanishing diffusion source stays exact")
{
    const ModeGrid grid(1.0, 4);
    const Mat p_term = terminal_preset(grid, "dense", 1.0, 3);
    const OperatorProcess g = operator_source_preset(grid, "dense", 1.0, 4);
    const TranspositionSolution sol = solve_linear_bqsde(p_term, g);
    const Mat x0 = conditional_expectation(terminal_preset(grid, "dense", 1.0, 5), 0);
    const OperatorProcess z = operator_source_preset(grid, "dense", 1.0, 6);
    const IdentityReport r = check_linear_duality(sol, p_term, g, x0, z,
                                                  OperatorProcess::zero(grid), 0, 1e-10);
    CHECK(r.pass);
}

TEST_CASE("transposition identity collapses to the initial pairing without data")
{
    // D = F = H = 0, P_T = I: the identity reduces to <xi2, xi1> at the anchor
    const ModeGrid grid(1.0, 4);
    AdjointData data = AdjointData::zero(grid);
    data.P_T = Mat::Identity(16, 16);
    const TranspositionSolution sol = solve_adjoint_bqsde(data);
    for (int t0 : {0, 1, 2}) {
        ProbeTuple p1 = probe_preset(grid, t0, 51);
        ProbeTuple p2 = probe_preset(grid, t0, 52);
        p1.u = VectorProcess::zero(grid);
        p1.v = VectorProcess::zero(grid);
        p2.u = VectorProcess::zero(grid);
        p2.v = VectorProcess::zero(grid);
        const IdentityReport r =
            check_transposition_identity(sol, data, t0, p1, p2, 1e-10);
        CHECK(r.pass);
        CHECK(std::abs(r.rhs - p2.xi.dot(p1.xi)) <= 1e-10);
    }
}

TEST_CASE("transposition defect decays under dyadic refinement at fixed seed")
{
    AdjointPreset preset;
    preset.d_name = "random";
    preset.d_lambda = 0.3;
    preset.f_name = "random";
    preset.f_lambda = 0.3;
    preset.terminal_name = "word";
    preset.source_name = "word";
    preset.seed = 2;
    const SweepResult s =
        transposition_defect_sweep({2, 4, 8}, 1.0, preset, 20, DriverMode::Implicit);
    CHECK(s.order >= 0.9);
    CHECK(s.errors.back() < s.errors.front());
}

TEST_CASE("rank-one algebra identities are exact")
{
    const ModeGrid grid(1.0, 6);
    for (uint64_t seed : {2u, 9u, 23u}) {
        const LinearCoefficients coeffs =
            coefficient_pair(grid, "random", 0.4, "random", 0.4, seed);
        const ProbeTuple p1 = probe_preset(grid, 0, seed + 61);
        const ProbeTuple p2 = probe_preset(grid, 0, seed + 62);
        const IdentityReport r = check_rank_one_algebra(p1.xi, p2.xi, coeffs.D.at(0),
                                                        coeffs.F.at(0), 1e-12);
        CHECK(r.pass);
    }
}

TEST_CASE("trace dictionary translations are exact")
{
    const ModeGrid grid(1.0, 6);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "random", 0.3, "random", 0.3, 2);
    for (uint64_t seed : {2u, 5u, 8u}) {
        const OperatorProcess q = operator_source_preset(grid, "word", 1.0, seed + 71);
        const ProbeTuple p1 = probe_preset(grid, 0, seed + 72);
        const ProbeTuple p2 = probe_preset(grid, 0, seed + 73);
        const IdentityReport r = check_trace_dictionary(q, p1, p2, coeffs, 0, 1e-10);
        CHECK(r.pass);
        CHECK(r.abs_error <= 1e-12);
    }
}

TEST_CASE("rank-one propagation converges weakly at first order")
{
    const SweepResult s = propagation_defect_sweep({4, 6, 8}, 1.0, 2, 10);
    CHECK(s.order >= 0.9);
    CHECK(s.errors.back() < s.errors.front());
}

TEST_CASE("relaxed identity defect decays and routes agree")
{
    AdjointPreset preset;
    preset.d_name = "random";
    preset.d_lambda = 0.3;
    preset.f_name = "random";
    preset.f_lambda = 0.3;
    preset.terminal_name = "word";
    preset.source_name = "word";
    preset.seed = 2;
    const RelaxedSweep s =
        relaxed_identity_sweep({3, 4, 5}, 1.0, preset, 10, DriverMode::Implicit);
    CHECK(s.relaxed.passes_order(1e-12));
    CHECK(s.uniqueness.passes_order(1e-12));
    CHECK(s.adjoint_defect <= 1e-10);
    CHECK(s.apriori_max <= 2.0 * std::max(1.0, s.apriori_min));
}

TEST_CASE("order fitting recovers synthetic rates and rejects short samples")
{
    const std::vector<double> dts{0.25, 0.125, 0.0625, 0.03125};
    std::vector<double> errs;
    for (double dt : dts)
        errs.push_back(3.0 * std::pow(dt, 1.5));
    CHECK(fit_order(dts, errs) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK_THROWS(fit_order({0.1, 0.05}, {1.0, 0.5}));
}

TEST_CASE("identity reports normalize and compare against tolerance")
{
    const IdentityReport ok = IdentityReport::make("demo", cplx(2.0, 0.0),
                                                   cplx(2.0, 1e-14), 1e-10);
    CHECK(ok.pass);
    CHECK(ok.rel_error <= 1e-10);
    const IdentityReport bad = IdentityReport::make("demo", cplx(1.0, 0.0),
                                                    cplx(1.1, 0.0), 1e-10);
    CHECK_FALSE(bad.pass);
    const IdentityReport d = IdentityReport::defect("demo", 1e-6, 100.0, 1e-7);
    CHECK(d.pass); // relative to scale 100 the defect is 1e-8
}
