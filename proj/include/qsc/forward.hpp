#pragma once

#include <functional>
#include <vector>

#include "qsc/process.hpp"

namespace qsc {

// D, F of the linear forward equation, in operator-norm mode.
struct LinearCoefficients {
    OperatorProcess D;
    OperatorProcess F;

    static LinearCoefficients zero(const ModeGrid& grid);

    // M_{D,F,2}(t_k) = ||D_k||_L^2 + ||F_k||_L^2
    double gronwall_weight(int k) const;
};

struct SchemeOptions {
    enum class Kind { Euler, Picard };
    Kind kind = Kind::Euler;
    int max_iterations = 50;
    double tolerance = 1e-12;

    static SchemeOptions euler() { return {}; }
    static SchemeOptions picard(int maxit = 50, double tol = 1e-12)
    {
        return {Kind::Picard, maxit, tol};
    }
};

struct PicardDivergence : std::runtime_error {
    double residual;
    PicardDivergence(const std::string& what, double res)
        : std::runtime_error(what), residual(res)
    {
    }
};

// Solution sampled at grid times t_0..t_N (x(t_k) = initial datum for k <= t0).
struct Path {
    const ModeGrid* grid = nullptr;
    int t0 = 0;
    std::vector<Vec> x; // size N+1

    const Vec& at(int j) const { return x.at(static_cast<size_t>(j)); }
    const Vec& terminal() const { return x.back(); }
    // left-endpoint samples as a simple adapted process
    VectorProcess as_process() const;
    double sup_norm() const;
};

struct OperatorPath {
    const ModeGrid* grid = nullptr;
    int t0 = 0;
    std::vector<Mat> x; // size N+1

    const Mat& at(int j) const { return x.at(static_cast<size_t>(j)); }
    const Mat& terminal() const { return x.back(); }
    OperatorProcess as_process() const;
    double sup_hs_norm() const;
};

// dx = (Dx + u)dt + (Fx + v)dW on [t_{t0}, T]
Path solve_linear(const Vec& xi, const VectorProcess& u, const VectorProcess& v,
                  const LinearCoefficients& coeffs, int t0,
                  const SchemeOptions& scheme = {});

// --- flow operators ---

// x(t_j) = at[j] * xi for adapted xi; columns outside L^2(C_{t0}) are zero
struct InitialFlow {
    const ModeGrid* grid = nullptr;
    int t0 = 0;
    std::vector<Mat> at; // size N+1, each 2^n x 2^n
};

// x(t_j) = at[j] * stacked source over steps t0..N-1 (each block 2^n)
struct SourceFlow {
    const ModeGrid* grid = nullptr;
    int t0 = 0;
    std::vector<Mat> at; // size N+1, each 2^n x (N-t0)*2^n
};

InitialFlow flow_U(const LinearCoefficients& coeffs, int t0,
                   const SchemeOptions& scheme = {});
SourceFlow flow_V(const LinearCoefficients& coeffs, int t0,
                  const SchemeOptions& scheme = {}); // drift sources
SourceFlow flow_Xi(const LinearCoefficients& coeffs, int t0,
                   const SchemeOptions& scheme = {}); // diffusion sources

// sup_{r} ||(U(r,t) - U(r,t0)) xi||_2, the Gronwall continuity modulus
double flow_shift_modulus(const LinearCoefficients& coeffs, int t0, int t, const Vec& xi,
                          const SchemeOptions& scheme = {});

// --- general controlled system ---

struct GeneralSystemSpec {
    // callbacks receive (step k, x(t_k)) with the control path already bound
    std::function<Vec(int, const Vec&)> drift;           // \hat D
    std::function<Vec(int, const Vec&)> left_diffusion;  // \hat F, multiplies dW from the left
    std::function<Vec(int, const Vec&)> right_diffusion; // \hat G, multiplied by dW from the left
};

Path solve_general(const GeneralSystemSpec& spec, const Vec& x0, const ModeGrid& grid, int t0);

// dX = z dt + w dW in the Hilbert-Schmidt class
OperatorPath solve_hs_forward(const Mat& x0, const OperatorProcess& z, const OperatorProcess& w,
                              int t0);

// --- stacked adapted-process bookkeeping for one anchor ---

struct AnchorSpace {
    const ModeGrid* grid = nullptr;
    int t0 = 0;

    int steps() const { return grid->n_steps() - t0; }
    Eigen::Index block_dim() const { return Eigen::Index{1} << grid->n_modes(); }
    Eigen::Index dim() const { return steps() * block_dim(); }

    Vec stack(const VectorProcess& p) const;
    VectorProcess unstack(const Vec& stacked, bool check = true) const;
    // diag(dt_k x I): the weight of the L^2_A inner product
    Vec weights() const;
    cplx pairing(const Vec& a, const Vec& b) const; // conj-first, dt-weighted
    // adjoint of a stacked-space map w.r.t. the weighted inner product
    Mat weighted_adjoint(const Mat& a) const;
    // per-step compression onto the adapted subspace
    Mat adapted_projector() const;
};

} // namespace qsc
