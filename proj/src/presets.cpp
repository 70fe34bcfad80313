#include "qsc/presets.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace qsc {

namespace {

// fixed coarse trigonometric profile: z(t) = a0 + sum_m a_m cos + b_m sin
struct Profile {
    double a0;
    std::array<double, 3> a;
    std::array<double, 3> b;

    double operator()(double t, double horizon) const
    {
        double s = a0;
        for (int m = 0; m < 3; ++m) {
            const double arg = 2.0 * std::numbers::pi * (m + 1) * t / horizon;
            s += a[static_cast<size_t>(m)] * std::cos(arg) / (m + 1) +
                 b[static_cast<size_t>(m)] * std::sin(arg) / (m + 1);
        }
        return s;
    }
};

Profile draw_profile(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Profile p;
    p.a0 = u(rng);
    for (int m = 0; m < 3; ++m) {
        p.a[static_cast<size_t>(m)] = u(rng);
        p.b[static_cast<size_t>(m)] = u(rng);
    }
    return p;
}

// Psi(z * chi_[0,t_k]) Omega for the profile z sampled on the grid cells
Vec field_word(const ModeGrid& grid, const Profile& z, int k)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    Vec w = Vec::Zero(dim);
    for (int j = 0; j < k; ++j)
        w(Eigen::Index{1} << j) = z(grid.time(j), grid.horizon()) * std::sqrt(grid.dt(j));
    return w;
}

// word vector c0 Omega + c1 W(t_k) Omega + c2 Psi(z1) Omega + c3 Psi(z2)Psi(z3) Omega,
// everything restricted to [0, t_k]
struct WordRecipe {
    std::array<double, 4> c;
    Profile z1, z2, z3;

    Vec at(const ModeGrid& grid, int k) const
    {
        Vec w = c[0] * Vec::Unit(Eigen::Index{1} << grid.n_modes(), 0);
        w += c[1] * brownian_word(grid, k);
        w += c[2] * field_word(grid, z1, k);
        w += c[3] * clifford_mul(field_word(grid, z2, k), field_word(grid, z3, k));
        return w;
    }
};

WordRecipe draw_recipe(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    WordRecipe r;
    for (auto& ci : r.c)
        ci = u(rng);
    r.z1 = draw_profile(rng);
    r.z2 = draw_profile(rng);
    r.z3 = draw_profile(rng);
    return r;
}

Vec random_adapted_vector(const ModeGrid& grid, int k, std::mt19937_64& rng)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    const uint32_t mask = (k >= 32) ? ~0u : ((1u << k) - 1u);
    std::normal_distribution<double> g(0.0, 1.0);
    Vec w = Vec::Zero(dim);
    for (Eigen::Index s = 0; s < dim; ++s)
        if (!(static_cast<uint32_t>(s) & ~mask))
            w(s) = cplx(g(rng), g(rng));
    return w;
}

Mat random_adapted_operator(const ModeGrid& grid, int k, std::mt19937_64& rng)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            m(i, j) = cplx(g(rng), g(rng));
    return conditional_expectation(Mat(m / std::sqrt(static_cast<double>(dim))), k);
}

} // namespace

OperatorProcess coefficient_preset(const ModeGrid& grid, const std::string& name,
                                   double lambda, uint64_t seed)
{
    const int n = grid.n_steps();
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    std::mt19937_64 rng(seed);
    std::vector<Mat> vals;
    vals.reserve(static_cast<size_t>(n));

    if (name == "zero") {
        return OperatorProcess::zero(grid, NormMode::Operator);
    }
    // coefficients are normalized to op-norm <= lambda; the normalizer is a
    // function of t, so the family stays comparable across refinements
    auto bounded = [lambda](Mat m) {
        const double nrm = op_norm(m);
        return Mat(lambda * m / std::max(1.0, nrm));
    };
    if (name == "scalar") {
        // lambda times the identity of L^2(C_{t_k})
        for (int k = 0; k < n; ++k)
            vals.push_back(lambda * conditional_expectation(Mat(Mat::Identity(dim, dim)), k));
    } else if (name == "field") {
        const Profile z = draw_profile(rng);
        for (int k = 0; k < n; ++k)
            vals.push_back(
                bounded(conditional_expectation(left_mul_matrix(field_word(grid, z, k)), k)));
    } else if (name == "word") {
        for (int k = 0; k < n; ++k)
            vals.push_back(
                bounded(conditional_expectation(left_mul_matrix(brownian_word(grid, k)), k)));
    } else if (name == "random") {
        const WordRecipe r = draw_recipe(rng);
        for (int k = 0; k < n; ++k)
            vals.push_back(
                bounded(conditional_expectation(left_mul_matrix(r.at(grid, k)), k)));
    } else {
        throw PresetError("unknown coefficient preset '" + name + "'");
    }
    return OperatorProcess(grid, std::move(vals), NormMode::Operator, false);
}

LinearCoefficients coefficient_pair(const ModeGrid& grid, const std::string& d_name,
                                    double d_lambda, const std::string& f_name,
                                    double f_lambda, uint64_t seed)
{
    return {coefficient_preset(grid, d_name, d_lambda, seed),
            coefficient_preset(grid, f_name, f_lambda, seed + 1)};
}

Mat terminal_preset(const ModeGrid& grid, const std::string& name, double scale,
                    uint64_t seed)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    const int n = grid.n_steps();
    std::mt19937_64 rng(seed);
    if (name == "zero")
        return Mat::Zero(dim, dim);
    if (name == "identity")
        return scale * Mat::Identity(dim, dim);
    if (name == "word") {
        const WordRecipe r = draw_recipe(rng);
        return scale * left_mul_matrix(r.at(grid, n));
    }
    if (name == "dense")
        return scale * random_adapted_operator(grid, n, rng);
    if (name == "rank-one") {
        const WordRecipe r1 = draw_recipe(rng);
        const WordRecipe r2 = draw_recipe(rng);
        return scale * Mat(r1.at(grid, n) * r2.at(grid, n).adjoint());
    }
    throw PresetError("unknown terminal preset '" + name + "'");
}

OperatorProcess operator_source_preset(const ModeGrid& grid, const std::string& name,
                                       double scale, uint64_t seed)
{
    const int n = grid.n_steps();
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    std::mt19937_64 rng(seed);
    std::vector<Mat> vals;
    vals.reserve(static_cast<size_t>(n));
    if (name == "zero")
        return OperatorProcess::zero(grid);
    if (name == "identity") {
        for (int k = 0; k < n; ++k)
            vals.push_back(scale * conditional_expectation(Mat(Mat::Identity(dim, dim)), k));
    } else if (name == "word") {
        const WordRecipe r = draw_recipe(rng);
        for (int k = 0; k < n; ++k)
            vals.push_back(scale *
                           conditional_expectation(left_mul_matrix(r.at(grid, k)), k));
    } else if (name == "dense") {
        for (int k = 0; k < n; ++k)
            vals.push_back(scale * random_adapted_operator(grid, k, rng));
    } else {
        throw PresetError("unknown operator source preset '" + name + "'");
    }
    return OperatorProcess(grid, std::move(vals), NormMode::HilbertSchmidt, false);
}

AdjointData make_adjoint_data(const ModeGrid& grid, const AdjointPreset& preset)
{
    AdjointData data = AdjointData::zero(grid);
    data.coeffs = coefficient_pair(grid, preset.d_name, preset.d_lambda, preset.f_name,
                                   preset.f_lambda, preset.seed);
    data.P_T = terminal_preset(grid, preset.terminal_name, preset.terminal_scale,
                               preset.seed + 11);
    data.H = operator_source_preset(grid, preset.source_name, preset.source_scale,
                                    preset.seed + 17);
    return data;
}

VectorProcess vector_source_preset(const ModeGrid& grid, const std::string& name,
                                   double scale, uint64_t seed)
{
    const int n = grid.n_steps();
    std::mt19937_64 rng(seed);
    std::vector<Vec> vals;
    vals.reserve(static_cast<size_t>(n));
    if (name == "zero")
        return VectorProcess::zero(grid);
    if (name == "profile") {
        const WordRecipe r = draw_recipe(rng);
        for (int k = 0; k < n; ++k)
            vals.push_back(scale * r.at(grid, k));
    } else if (name == "random") {
        for (int k = 0; k < n; ++k)
            vals.push_back(scale * random_adapted_vector(grid, k, rng));
    } else {
        throw PresetError("unknown vector source preset '" + name + "'");
    }
    return VectorProcess(grid, std::move(vals), false);
}

Vec initial_preset(const ModeGrid& grid, const std::string& name, double scale, int t0,
                   uint64_t seed)
{
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    std::mt19937_64 rng(seed);
    if (name == "vacuum")
        return scale * Vec::Unit(dim, 0);
    if (name == "profile") {
        const WordRecipe r = draw_recipe(rng);
        return scale * r.at(grid, t0);
    }
    if (name == "random")
        return scale * random_adapted_vector(grid, t0, rng);
    throw PresetError("unknown initial preset '" + name + "'");
}

ProbeTuple probe_preset(const ModeGrid& grid, int t0, uint64_t seed, bool intrinsic)
{
    const std::string vec_name = intrinsic ? "profile" : "random";
    return ProbeTuple{initial_preset(grid, vec_name, 1.0, t0, seed),
                      vector_source_preset(grid, vec_name, 1.0, seed + 101),
                      vector_source_preset(grid, vec_name, 1.0, seed + 202)};
}

} // namespace qsc
