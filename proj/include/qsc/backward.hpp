#pragma once

#include <map>
#include <vector>

#include "qsc/forward.hpp"

namespace qsc {

// Data of the second-order adjoint equation: terminal operator, running
// operator source, and the forward coefficients entering the driver.
struct AdjointData {
    Mat P_T;
    OperatorProcess H;
    LinearCoefficients coeffs;

    static AdjointData zero(const ModeGrid& grid);
};

struct TranspositionSolution {
    const ModeGrid* grid = nullptr;
    std::vector<Mat> P;           // size N+1, P[k] adapted to step k
    OperatorProcess Q;            // N entries
    std::vector<double> residual; // HS norm of the non-representable part, per step

    const Mat& at(int k) const { return P.at(static_cast<size_t>(k)); }
    // zeta^{t0} = P(t0) holds exactly in the discrete recursion
    const Mat& zeta(int t0) const { return at(t0); }
    double sup_op_norm() const;
    double residual_l1(const ModeGrid& g) const;
};

enum class DriverMode { Implicit, Explicit };

// raised when dt * Lip(f) is too large for the per-step fixed point
struct StepContractionError : std::runtime_error {
    int suggested_steps;
    StepContractionError(const std::string& what, int suggested)
        : std::runtime_error(what), suggested_steps(suggested)
    {
    }
};

// P(t0) xi = E[U(T,t0)* P_T U(T,t0) xi - int U(t,t0)* H(t) U(t,t0) xi dt | C_{t0}]
Mat representation_P(const AdjointData& data, int t0, const SchemeOptions& scheme = {});

// dP = g dt + Q dW backward from P_T, by least-squares martingale decomposition
TranspositionSolution solve_linear_bqsde(const Mat& p_terminal, const OperatorProcess& g);

// full driver f(t,P,Q) = -PD - D*P - F*Q Y - Q Y F - F*PF + H
TranspositionSolution solve_adjoint_bqsde(const AdjointData& data,
                                          DriverMode mode = DriverMode::Implicit,
                                          int max_iterations = 150, double tolerance = 1e-12);

// rank-n projection of P_T and H in the fixed Fock enumeration (clamps with notice)
AdjointData galerkin_truncate(const AdjointData& data, int rank);

struct GalerkinRow {
    int rank = 0;
    double sup_error = 0.0;
};

std::vector<GalerkinRow> galerkin_convergence_study(const AdjointData& data,
                                                    const std::vector<int>& ranks, int t0,
                                                    const std::vector<Vec>& probes,
                                                    DriverMode mode = DriverMode::Implicit);

// which assembly produces the Q3 operator of the relaxed family
enum class Q3Route { Direct, FromDuality };

// Operator blocks of the relaxed family at one anchor, as explicit matrices
// over the stacked process space of the anchor.
struct RelaxedBlocks {
    AnchorSpace space;
    Mat Q1, Q1hat;   // stacked x 2^n, columns outside L^2(C_{t0}) zero
    Mat Q2, Q2hat;   // stacked x stacked
    Mat Q3, Q3star;  // stacked x stacked; Q3 = (1/2) Qhat3
    // the two assemblies of the sesquilinear form and their gap
    Mat gram_direct, gram_duality;
    double gram_discrepancy = 0.0;
};

struct RelaxedSolution {
    const ModeGrid* grid = nullptr;
    TranspositionSolution base;
    std::map<int, RelaxedBlocks> anchors;

    const RelaxedBlocks& blocks(int t0) const;
};

RelaxedSolution assemble_relaxed(const AdjointData& data, const TranspositionSolution& sol,
                                 const std::vector<int>& anchors,
                                 Q3Route route = Q3Route::Direct,
                                 const SchemeOptions& scheme = {});

// Q^{(t0)}(xi,u,v) = Q1 xi + Q2 u + Q3 v, and the hatted counterpart
VectorProcess relaxed_apply(const RelaxedSolution& r, int t0, const Vec& xi,
                            const VectorProcess& u, const VectorProcess& v);
VectorProcess relaxed_apply_hat(const RelaxedSolution& r, int t0, const Vec& xi,
                                const VectorProcess& u, const VectorProcess& v);

// monitored ratio of the a priori estimate: solution size over data size
double apriori_ratio(const AdjointData& data, const RelaxedSolution& r);

} // namespace qsc
