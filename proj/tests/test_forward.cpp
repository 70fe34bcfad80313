#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsc/presets.hpp"
#include "qsc/sweeps.hpp"

using namespace qsc;

TEST_CASE("scalar drift recursion reproduces the compound-growth value")
{
    // dx = lambda x dt from the vacuum: x(T) = (1 + lambda dt)^N Omega
    const double lambda = 0.4;
    const ModeGrid grid(1.0, 4);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "scalar", lambda, "zero", 0.0, 0);
    const Vec xi = Vec::Unit(16, 0);
    const Path x =
        solve_linear(xi, VectorProcess::zero(grid), VectorProcess::zero(grid), coeffs, 0);
    CHECK(std::abs(x.terminal()(0) - 1.4641) <= 1e-12); // (1 + 0.4/4)^4
    for (Eigen::Index i = 1; i < 16; ++i)
        CHECK(std::abs(x.terminal()(i)) <= 1e-14);
}

TEST_CASE("scalar refinement converges to the exponential at first order")
{
    const SweepResult s = scalar_forward_sweep({3, 4, 6, 8}, 1.0, 0.4);
    CHECK(s.order > 0.9);
    CHECK(s.order < 1.1);
    CHECK(s.errors.back() < s.errors.front());
}

TEST_CASE("superposition through the flow operators is exact")
{
    const ModeGrid grid(1.0, 4);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "random", 0.4, "random", 0.3, 2);
    for (int t0 : {0, 2}) {
        const ProbeTuple p = probe_preset(grid, t0, 7);
        const Path x = solve_linear(p.xi, p.u, p.v, coeffs, t0);
        const InitialFlow fu = flow_U(coeffs, t0);
        const SourceFlow fv = flow_V(coeffs, t0);
        const SourceFlow fx = flow_Xi(coeffs, t0);
        const AnchorSpace sp{&grid, t0};
        const Vec su = sp.stack(p.u);
        const Vec sv = sp.stack(p.v);
        for (int j = 0; j <= 4; ++j) {
            const size_t js = static_cast<size_t>(j);
            const Vec rec = fu.at[js] * p.xi + fv.at[js] * su + fx.at[js] * sv;
            CHECK((x.at(j) - rec).norm() <= 1e-12 * std::max(1.0, x.at(j).norm()));
        }
    }
}

TEST_CASE("euler and picard agree on the same discrete equation")
{
    const ModeGrid grid(1.0, 5);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "random", 0.4, "random", 0.3, 3);
    const ProbeTuple p = probe_preset(grid, 0, 11);
    const Path xe = solve_linear(p.xi, p.u, p.v, coeffs, 0, SchemeOptions::euler());
    const Path xp = solve_linear(p.xi, p.u, p.v, coeffs, 0, SchemeOptions::picard());
    for (int j = 0; j <= 5; ++j)
        CHECK((xe.at(j) - xp.at(j)).norm() <= 1e-10 * std::max(1.0, xe.at(j).norm()));
}

TEST_CASE("the general solver reduces to the linear one")
{
    const ModeGrid grid(1.0, 4);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "random", 0.4, "random", 0.3, 5);
    const ProbeTuple p = probe_preset(grid, 0, 13);
    GeneralSystemSpec spec;
    spec.drift = [&](int k, const Vec& x) { return Vec(coeffs.D.at(k) * x + p.u.at(k)); };
    spec.left_diffusion = [&](int k, const Vec& x) {
        return Vec(coeffs.F.at(k) * x + p.v.at(k));
    };
    spec.right_diffusion = [](int, const Vec& x) { return Vec(Vec::Zero(x.size())); };
    const Path xg = solve_general(spec, p.xi, grid, 0);
    const Path xl = solve_linear(p.xi, p.u, p.v, coeffs, 0);
    for (int j = 0; j <= 4; ++j)
        CHECK((xg.at(j) - xl.at(j)).norm() <= 1e-12 * std::max(1.0, xl.at(j).norm()));
}

TEST_CASE("solutions stay in the algebra and start at the initial datum")
{
    const ModeGrid grid(1.0, 5);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "random", 0.5, "random", 0.5, 8);
    const int t0 = 2;
    const ProbeTuple p = probe_preset(grid, t0, 17);
    const Path x = solve_linear(p.xi, p.u, p.v, coeffs, t0);
    for (int j = 0; j <= t0; ++j)
        CHECK((x.at(j) - p.xi).norm() <= 1e-14);
    for (int j = 0; j <= 5; ++j)
        CHECK(is_adapted(x.at(j), j < t0 ? t0 : j));
}

TEST_CASE("hs forward equation integrates operator sources")
{
    const ModeGrid grid(1.0, 4);
    const Mat x0 = conditional_expectation(terminal_preset(grid, "word", 1.0, 4), 0);
    const OperatorProcess z = operator_source_preset(grid, "word", 1.0, 5);
    const OperatorProcess w = operator_source_preset(grid, "word", 1.0, 6);
    const OperatorPath x = solve_hs_forward(x0, z, w, 0);
    // dX = z dt + w dW built up step by step
    Mat manual = x0;
    for (int k = 0; k < 4; ++k) {
        manual += z.at(k) * grid.dt(k) +
                  w.at(k) * left_mul_matrix(brownian_increment_word(grid, k));
        CHECK((x.at(k + 1) - manual).norm() <= 1e-12 * std::max(1.0, manual.norm()));
    }
}

TEST_CASE("flow shift modulus vanishes at the anchor and stays finite")
{
    const ModeGrid grid(1.0, 4);
    const LinearCoefficients coeffs =
        coefficient_pair(grid, "random", 0.4, "random", 0.3, 9);
    const Vec xi = initial_preset(grid, "profile", 1.0, 1, 19);
    CHECK(flow_shift_modulus(coeffs, 1, 1, xi) <= 1e-14);
    const double m = flow_shift_modulus(coeffs, 1, 3, xi);
    CHECK(std::isfinite(m));
    CHECK(m >= 0.0);
}
