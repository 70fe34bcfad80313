#pragma once

#include <string>
#include <vector>

#include "qsc/clifford.hpp"
#include "qsc/grid.hpp"

namespace qsc {

// Adaptedness violations are hard errors: the process spaces are defined by
// the filtration constraint, silent repair would mask bugs.
struct AdaptednessError : std::runtime_error {
    explicit AdaptednessError(const std::string& what) : std::runtime_error(what) {}
};

enum class NormMode { Operator, HilbertSchmidt };

// Simple adapted L^2(C)-process: value f_k on [t_k, t_{k+1}), f_k adapted to step k.
class VectorProcess {
public:
    // empty state; usable only as an assignment target
    VectorProcess() : grid_(nullptr) {}
    VectorProcess(const ModeGrid& grid, std::vector<Vec> values, bool check = true);

    static VectorProcess zero(const ModeGrid& grid);
    static VectorProcess constant(const ModeGrid& grid, const Vec& value);

    const ModeGrid& grid() const { return *grid_; }
    int n_steps() const { return static_cast<int>(values_.size()); }
    const Vec& at(int k) const { return values_.at(static_cast<size_t>(k)); }
    Vec& at(int k) { return values_.at(static_cast<size_t>(k)); }

    // (int_0^T ||f||_2^2 dt)^{1/2}
    double l2_norm() const;

private:
    const ModeGrid* grid_;
    std::vector<Vec> values_;
};

// Simple adapted operator-valued process; each value satisfies Pi_k Phi_k Pi_k = Phi_k.
class OperatorProcess {
public:
    // empty state; usable only as an assignment target
    OperatorProcess() : grid_(nullptr), mode_(NormMode::HilbertSchmidt) {}
    OperatorProcess(const ModeGrid& grid, std::vector<Mat> values,
                    NormMode mode = NormMode::HilbertSchmidt, bool check = true);

    static OperatorProcess zero(const ModeGrid& grid, NormMode mode = NormMode::HilbertSchmidt);
    static OperatorProcess identity(const ModeGrid& grid,
                                    NormMode mode = NormMode::HilbertSchmidt);

    const ModeGrid& grid() const { return *grid_; }
    NormMode mode() const { return mode_; }
    int n_steps() const { return static_cast<int>(values_.size()); }
    const Mat& at(int k) const { return values_.at(static_cast<size_t>(k)); }
    Mat& at(int k) { return values_.at(static_cast<size_t>(k)); }

    double l2_hs_norm() const;
    double l1_op_norm() const;

private:
    const ModeGrid* grid_;
    std::vector<Mat> values_;
    NormMode mode_;
};

// --- stochastic integrals over step ranges [from, to) ---

// sum_k phi_k . DeltaW_k (algebra product, increment on the right)
Vec left_ito_integral(const VectorProcess& phi, int from, int to);
// sum_k DeltaW_k . gamma_k
Vec right_ito_integral(const VectorProcess& gamma, int from, int to);
// sum_k Phi_k o L_{DeltaW_k}
Mat hs_ito_integral(const OperatorProcess& phi, int from, int to);
// sum_k L_{DeltaW_k} o Phi_k (the hatted, left-multiplied integral)
Mat hs_ito_integral_left(const OperatorProcess& phi, int from, int to);

struct IsometryReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
};

IsometryReport vector_isometry_check(const VectorProcess& phi, bool right_sided = false);
IsometryReport hs_isometry_check(const OperatorProcess& phi);

// per-step orthogonal projection onto the adapted subspace (compression)
OperatorProcess adapted_projection(const ModeGrid& grid, const std::vector<Mat>& raw,
                                   NormMode mode = NormMode::HilbertSchmidt);

// int <P(t), f(t)>_HS dt = sum_k tr(P_k^* f_k) dt_k
cplx duality_pairing(const OperatorProcess& p, const OperatorProcess& f);
// int <p(t), f(t)> dt on vector processes
cplx duality_pairing(const VectorProcess& p, const VectorProcess& f);

} // namespace qsc
