#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "qsc/grid.hpp"

namespace qsc {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Truncation cap. Memory is O(4^n) per operator; 12 modes = 4096-dim space.
inline constexpr int kMaxModes = 12;

// Fock basis of n modes: occupation subsets S of {0..n-1} in bitmask order,
// vacuum = empty subset at index 0. Basis vectors e_S = a_{k1}^+ ... a_{km}^+ Omega
// (k1 < ... < km, orthonormal modes) are orthonormal.
struct FockBasis {
    int n_modes = 0;
    int dim = 1;

    static FockBasis build(int n_modes);
};

int modes_of_dim(Eigen::Index dim);

// --- one-particle layer: coefficients over the (unnormalized) grid modes ---

// <w,z> with the cell weights, conjugate-linear in the first slot.
cplx field_inner(const ModeGrid& grid, const Vec& w, const Vec& z);
double field_norm(const ModeGrid& grid, const Vec& z);
// conjugation J (grid modes are real indicators)
Vec field_conj(const Vec& z);

// --- field operators on the 2^n-dimensional Fock space ---

Mat creation_op(const ModeGrid& grid, const Vec& z);
Mat annihilation_op(const ModeGrid& grid, const Vec& z);
// Psi(z) = C(z) + A(Jz)
Mat field_op(const ModeGrid& grid, const Vec& z);

// DeltaW_k = Psi(chi_[t_k,t_{k+1})): as operator and as the word DeltaW_k Omega
Mat brownian_increment_op(const ModeGrid& grid, int k);
Vec brownian_increment_word(const ModeGrid& grid, int k);
// W(t_j) = sum of the first j increments
Mat brownian_op(const ModeGrid& grid, int j);
Vec brownian_word(const ModeGrid& grid, int j);

// --- state, norms, filtration ---

cplx state(const Vec& f);
cplx state(const Mat& f);

double op_norm(const Mat& a);
double hs_norm(const Mat& a);
// m(|f|^p)^{1/p}; p = infinity handled by op_norm
double lp_norm(const Mat& f, double p);

// adapted to step k = supported on subsets of modes {0..k-1}
bool is_adapted(const Vec& f, int k, double tol = 1e-12);
bool is_adapted(const Mat& a, int k, double tol = 1e-12);

Vec conditional_expectation(const Vec& f, int k);
// compression Pi_k A Pi_k; satisfies m(E[f|C_k]g) = m(fg) for g adapted to k
Mat conditional_expectation(const Mat& a, int k);

// grading operator: diag (-1)^|S|
Mat parity_op(int n_modes);
Vec parity_apply(const Vec& f);

// --- Clifford multiplication (CAR signs, orthonormal generators) ---

// sign of psi_S psi_T = sign * psi_{S xor T}
int clifford_sign(uint32_t s, uint32_t t);

// (a Omega)(b Omega) -> (ab) Omega
Vec clifford_mul(const Vec& a, const Vec& b);
Mat left_mul_matrix(const Vec& a);
Mat right_mul_matrix(const Vec& a);

} // namespace qsc
