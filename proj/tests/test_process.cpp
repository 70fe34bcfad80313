#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsc/presets.hpp"
#include "qsc/process.hpp"

using namespace qsc;

TEST_CASE("adaptedness is enforced at construction")
{
    const ModeGrid grid(1.0, 4);
    const Eigen::Index dim = 16;
    std::vector<Vec> vals(4, Vec::Zero(dim));
    vals[0](1) = 1.0; // mode 0 occupied at step 0: not measurable yet
    CHECK_THROWS_AS(VectorProcess(grid, vals), AdaptednessError);
    vals[0](1) = 0.0;
    vals[2](1) = 1.0; // fine: step 2 sees mode 0
    CHECK_NOTHROW(VectorProcess(grid, vals));

    std::vector<Mat> ops(4, Mat::Zero(dim, dim));
    ops[1](4, 0) = 1.0; // mode 2 occupied at step 1
    CHECK_THROWS_AS(OperatorProcess(grid, ops), AdaptednessError);
}

TEST_CASE("ito isometry is exact on simple adapted processes")
{
    const ModeGrid grid(1.0, 6);
    for (uint64_t s : {1u, 2u, 3u, 4u, 5u}) {
        const VectorProcess phi = vector_source_preset(grid, "random", 1.0, s);
        CHECK(vector_isometry_check(phi, false).rel_error <= 1e-12);
        CHECK(vector_isometry_check(phi, true).rel_error <= 1e-12);
        const OperatorProcess op = operator_source_preset(grid, "dense", 1.0, s + 7);
        CHECK(hs_isometry_check(op).rel_error <= 1e-12);
    }
}

TEST_CASE("stochastic integrals against explicit one-step processes")
{
    const ModeGrid grid(1.0, 4);
    const Eigen::Index dim = 16;
    const double rdt = std::sqrt(grid.dt(2));
    // phi = e_0 on step 2 only
    std::vector<Vec> vals(4, Vec::Zero(dim));
    vals[2](0) = 1.0;
    const VectorProcess phi(grid, vals);
    const Vec li = left_ito_integral(phi, 0, 4);
    CHECK(std::real(li(Eigen::Index{1} << 2)) == doctest::Approx(rdt));
    CHECK(li.norm() == doctest::Approx(rdt));
    // integrating over a range that misses the support gives zero
    CHECK(left_ito_integral(phi, 0, 2).norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS(left_ito_integral(phi, 0, 5), std::out_of_range);

    // operator-valued: the compressed-identity process
    const OperatorProcess id = OperatorProcess::identity(grid);
    const Mat hi = hs_ito_integral(id, 0, 4);
    const Mat hl = hs_ito_integral_left(id, 0, 4);
    // right-sided: the step-k compression kills its own fresh increment word
    CHECK(Vec(hi.col(0)).norm() <= 1e-12);
    // left-sided: the increment lands outside the compression and survives
    CHECK((Vec(hl.col(0)) - brownian_word(grid, 4)).norm() <= 1e-12);
}

TEST_CASE("left and right hs integrals differ on generic integrands")
{
    const ModeGrid grid(1.0, 5);
    const OperatorProcess q = operator_source_preset(grid, "word", 1.0, 9);
    const Mat a = hs_ito_integral(q, 0, 5);
    const Mat b = hs_ito_integral_left(q, 0, 5);
    CHECK((a - b).norm() > 1e-6 * a.norm());
}

TEST_CASE("duality pairing is sesquilinear and dt-weighted")
{
    const ModeGrid grid(1.0, 4);
    const VectorProcess p = vector_source_preset(grid, "profile", 1.0, 21);
    const VectorProcess f = vector_source_preset(grid, "profile", 1.0, 22);
    cplx manual = 0.0;
    for (int k = 0; k < 4; ++k)
        manual += p.at(k).dot(f.at(k)) * grid.dt(k);
    CHECK(std::abs(duality_pairing(p, f) - manual) <= 1e-14);
    CHECK(std::abs(duality_pairing(p, f) - std::conj(duality_pairing(f, p))) <= 1e-13);

    const OperatorProcess po = operator_source_preset(grid, "word", 1.0, 23);
    const OperatorProcess fo = operator_source_preset(grid, "word", 1.0, 24);
    cplx manual_o = 0.0;
    for (int k = 0; k < 4; ++k)
        manual_o += (po.at(k).adjoint() * fo.at(k)).trace() * grid.dt(k);
    CHECK(std::abs(duality_pairing(po, fo) - manual_o) <= 1e-13);
}

TEST_CASE("adapted projection compresses and is idempotent")
{
    const ModeGrid grid(1.0, 4);
    const Eigen::Index dim = 16;
    std::vector<Mat> raw;
    for (int k = 0; k < 4; ++k)
        raw.push_back(Mat::Ones(dim, dim));
    const OperatorProcess proj = adapted_projection(grid, raw);
    for (int k = 0; k < 4; ++k) {
        CHECK(is_adapted(proj.at(k), k));
        CHECK((conditional_expectation(proj.at(k), k) - proj.at(k)).norm() <= 1e-14);
        // the surviving block is the all-ones block of size 2^k
        CHECK(std::abs(proj.at(k).sum()) == doctest::Approx(std::pow(4.0, k)));
    }
}

TEST_CASE("process norms")
{
    const ModeGrid grid(1.0, 4);
    const Eigen::Index dim = 16;
    const VectorProcess c = VectorProcess::constant(grid, Vec::Unit(dim, 0));
    CHECK(c.l2_norm() == doctest::Approx(1.0)); // unit vector, total time 1
    const OperatorProcess idp = OperatorProcess::identity(grid);
    // per-step compressed identity has HS norm 2^{k/2}
    double expect = 0.0;
    for (int k = 0; k < 4; ++k)
        expect += std::pow(2.0, k) * grid.dt(k);
    CHECK(idp.l2_hs_norm() == doctest::Approx(std::sqrt(expect)));
    CHECK(idp.l1_op_norm() == doctest::Approx(1.0)); // projections have norm one
}

TEST_CASE("grid construction and validation")
{
    CHECK_THROWS(ModeGrid(1.0, -1));
    CHECK_THROWS(ModeGrid(-1.0, 4));
    const ModeGrid g(2.0, 4);
    CHECK(g.n_modes() == 4);
    CHECK(g.dt(1) == doctest::Approx(0.5));
    CHECK(g.time(4) == doctest::Approx(2.0));
    // explicit grids must start at zero and increase strictly
    CHECK_THROWS(ModeGrid(std::vector<double>{0.5, 1.0}));
    CHECK_THROWS(ModeGrid(std::vector<double>{0.0, 1.0, 1.0}));
    const ModeGrid h(std::vector<double>{0.0, 0.25, 1.0});
    CHECK(h.n_steps() == 2);
    CHECK(h.dt(1) == doctest::Approx(0.75));
}
