#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qsc/clifford.hpp"

using namespace qsc;

namespace {

Vec random_field(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Vec z(n);
    for (int i = 0; i < n; ++i)
        z(i) = cplx(g(rng), g(rng));
    return z;
}

Vec random_element(Eigen::Index dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Vec f(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        f(i) = cplx(g(rng), g(rng));
    return f;
}

} // namespace

TEST_CASE("fock basis dimensions")
{
    CHECK(FockBasis::build(0).dim == 1);
    CHECK(FockBasis::build(5).dim == 32);
    CHECK(modes_of_dim(64) == 6);
    CHECK_THROWS(modes_of_dim(48));
}

TEST_CASE("canonical anticommutation relations")
{
    const ModeGrid grid(1.0, 5);
    const Eigen::Index dim = 32;
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 25; ++trial) {
        const Vec z = random_field(5, rng);
        const Vec w = random_field(5, rng);
        const Mat pz = field_op(grid, z);
        const Mat pw = field_op(grid, w);
        const cplx pair = 2.0 * field_inner(grid, field_conj(w), z);
        const double defect =
            op_norm(pz * pw + pw * pz - pair * Mat::Identity(dim, dim));
        CHECK(defect <= 1e-12 * field_norm(grid, z) * field_norm(grid, w));

        // creation operators anticommute among themselves
        const Mat cz = creation_op(grid, z);
        const Mat cw = creation_op(grid, w);
        CHECK(op_norm(cz * cw + cw * cz) <=
              1e-12 * field_norm(grid, z) * field_norm(grid, w));
        // {A(z), C(w)} = <z, w> I for the annihilation/creation pair
        const Mat az = annihilation_op(grid, z);
        const cplx inner = field_inner(grid, z, w);
        CHECK(op_norm(az * cw + cw * az - inner * Mat::Identity(dim, dim)) <=
              1e-12 * field_norm(grid, z) * field_norm(grid, w));
    }
}

TEST_CASE("creation operator norm equals field norm")
{
    const ModeGrid grid(1.0, 4);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec z = random_field(4, rng);
        const double nz = field_norm(grid, z);
        CHECK(op_norm(creation_op(grid, z)) == doctest::Approx(nz).epsilon(1e-10));
    }
}

TEST_CASE("brownian words and operators")
{
    const ModeGrid grid(1.0, 8);
    const Eigen::Index dim = 256;
    for (int j = 0; j <= 8; ++j) {
        const Mat w = brownian_op(grid, j);
        const double tj = grid.time(j);
        // self-adjoint, and W(t)^2 = t I
        CHECK(op_norm(Mat(w - w.adjoint())) <= 1e-12 * std::max(1.0, std::sqrt(tj)));
        CHECK(op_norm(Mat(w * w - tj * Mat::Identity(dim, dim))) <=
              1e-12 * std::max(1.0, tj));
        // the word is the operator applied to the vacuum
        CHECK((w.col(0) - brownian_word(grid, j)).norm() <= 1e-14);
    }
    // increments on disjoint cells anticommute
    const Mat w0 = brownian_increment_op(grid, 0);
    const Mat w3 = brownian_increment_op(grid, 3);
    CHECK(op_norm(Mat(w0 * w3 + w3 * w0)) <= 1e-13);
}

TEST_CASE("lp norms of the brownian word")
{
    const ModeGrid grid(1.0, 6);
    for (int j = 1; j <= 6; ++j) {
        const Mat w = brownian_op(grid, j);
        const double tj = grid.time(j);
        CHECK(lp_norm(w, 2.0) == doctest::Approx(std::sqrt(tj)).epsilon(1e-10));
        CHECK(op_norm(w) == doctest::Approx(std::sqrt(tj)).epsilon(1e-10));
    }
}

TEST_CASE("state is tracial on products")
{
    const ModeGrid grid(1.0, 5);
    std::mt19937_64 rng(11);
    const Vec a = random_element(32, rng);
    const Vec b = random_element(32, rng);
    const cplx mab = state(clifford_mul(a, b));
    const cplx mba = state(clifford_mul(b, a));
    CHECK(std::abs(mab - mba) <= 1e-12 * (a.norm() * b.norm()));
}

TEST_CASE("clifford multiplication is associative and matches matrices")
{
    std::mt19937_64 rng(3);
    const Eigen::Index dim = 64;
    const Vec a = random_element(dim, rng);
    const Vec b = random_element(dim, rng);
    const Vec c = random_element(dim, rng);
    const Vec ab_c = clifford_mul(clifford_mul(a, b), c);
    const Vec a_bc = clifford_mul(a, clifford_mul(b, c));
    CHECK((ab_c - a_bc).norm() <= 1e-10 * a.norm() * b.norm() * c.norm());

    const Mat la = left_mul_matrix(a);
    CHECK((Vec(la * b) - clifford_mul(a, b)).norm() <= 1e-11 * a.norm() * b.norm());
    const Mat rb = right_mul_matrix(b);
    CHECK((Vec(rb * a) - clifford_mul(a, b)).norm() <= 1e-11 * a.norm() * b.norm());
    // left and right multiplications commute
    CHECK((la * rb - rb * la).norm() <= 1e-10 * a.norm() * b.norm());
}

TEST_CASE("clifford signs compose")
{
    for (uint32_t s = 0; s < 16; ++s)
        for (uint32_t t = 0; t < 16; ++t) {
            const int st = clifford_sign(s, t);
            CHECK((st == 1 || st == -1));
            if ((s & t) == 0) {
                // disjoint words: swapping costs (-1)^{|s||t|}
                const int expected =
                    (__builtin_popcount(s) * __builtin_popcount(t)) % 2 == 0 ? 1 : -1;
                CHECK(clifford_sign(t, s) == st * expected);
            }
        }
}

TEST_CASE("graded commutation of adapted elements with fresh increments")
{
    const ModeGrid grid(1.0, 6);
    std::mt19937_64 rng(5);
    for (int k = 1; k < 6; ++k) {
        Vec y = random_element(64, rng);
        y = conditional_expectation(y, k);
        const Vec w = brownian_increment_word(grid, k);
        // y . w = w . parity(y) for y measurable before the increment
        const Vec lhs = clifford_mul(y, w);
        const Vec rhs = clifford_mul(w, parity_apply(y));
        CHECK((lhs - rhs).norm() <= 1e-12 * y.norm());
    }
}

TEST_CASE("conditional expectation properties")
{
    const ModeGrid grid(1.0, 6);
    const Eigen::Index dim = 64;
    std::mt19937_64 rng(13);
    const Vec f = random_element(dim, rng);
    for (int k = 0; k <= 6; ++k) {
        const Vec ef = conditional_expectation(f, k);
        CHECK(is_adapted(ef, k));
        // idempotent
        CHECK((conditional_expectation(ef, k) - ef).norm() <= 1e-13 * f.norm());
        // contractive in L^2
        CHECK(ef.norm() <= f.norm() + 1e-13);
        // m(E[f|k] g) = m(f g) for adapted g
        Vec g = conditional_expectation(random_element(dim, rng), k);
        const cplx lhs = state(clifford_mul(ef, g));
        const cplx rhs = state(clifford_mul(f, g));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * f.norm() * g.norm());
    }
    // operator compression agrees with the vector picture on left multipliers
    const Mat la = left_mul_matrix(f);
    for (int k = 0; k <= 6; ++k) {
        const Mat ela = conditional_expectation(la, k);
        CHECK(is_adapted(ela, k));
        CHECK((Vec(ela.col(0)) - conditional_expectation(f, k)).norm() <=
              1e-12 * f.norm());
    }
}

TEST_CASE("parity is a *-automorphism squaring to the identity")
{
    const Eigen::Index dim = 32;
    std::mt19937_64 rng(17);
    const Vec a = random_element(dim, rng);
    const Vec b = random_element(dim, rng);
    CHECK((parity_apply(parity_apply(a)) - a).norm() <= 1e-14 * a.norm());
    const Vec lhs = parity_apply(clifford_mul(a, b));
    const Vec rhs = clifford_mul(parity_apply(a), parity_apply(b));
    CHECK((lhs - rhs).norm() <= 1e-12 * a.norm() * b.norm());
    const Mat y = parity_op(5);
    CHECK((y * a - parity_apply(a)).norm() <= 1e-14 * a.norm());
}

TEST_CASE("hilbert-schmidt and operator norms are compatible")
{
    std::mt19937_64 rng(19);
    const Eigen::Index dim = 16;
    Mat a(dim, dim);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            a(i, j) = cplx(g(rng), g(rng));
    CHECK(op_norm(a) <= hs_norm(a) + 1e-12);
    CHECK(hs_norm(a) == doctest::Approx(a.norm()).epsilon(1e-12));
}
