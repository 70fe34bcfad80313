#pragma once

#include <string>
#include <vector>

#include "qsc/backward.hpp"

namespace qsc {

struct IdentityReport {
    std::string name;
    cplx lhs{0.0};
    cplx rhs{0.0};
    double abs_error = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    static IdentityReport make(std::string name, cplx lhs, cplx rhs, double tolerance);
    // for defect-style checks where only a residual magnitude is meaningful
    static IdentityReport defect(std::string name, double defect, double scale,
                                 double tolerance);
};

// one probe tuple (xi, u, v) of the variational identities
struct ProbeTuple {
    Vec xi;
    VectorProcess u;
    VectorProcess v;
};

// Def. of the transposition solution: the seven-term identity against a pair
// of forward solutions from (xi_i, u_i, v_i).
IdentityReport check_transposition_identity(const TranspositionSolution& sol,
                                            const AdjointData& data, int t0,
                                            const ProbeTuple& p1, const ProbeTuple& p2,
                                            double tolerance,
                                            const SchemeOptions& scheme = {});

// Relaxed form: the Q-integrals are replaced by the anchored operator family.
IdentityReport check_relaxed_identity(const RelaxedSolution& r, const AdjointData& data,
                                      int t0, const ProbeTuple& p1, const ProbeTuple& p2,
                                      double tolerance, const SchemeOptions& scheme = {});

// <P_T, X(T)> - int <g, X> = int <P, z> + int <Q, w> + <zeta^{t0}, X0>
IdentityReport check_linear_duality(const TranspositionSolution& sol, const Mat& p_terminal,
                                    const OperatorProcess& g, const Mat& x0,
                                    const OperatorProcess& z, const OperatorProcess& w,
                                    int t0, double tolerance);

// the three pointwise algebraic identities for T = x1 (x) x2
IdentityReport check_rank_one_algebra(const Vec& x1, const Vec& x2, const Mat& d,
                                      const Mat& f, double tolerance);

// discrete propagation of dT = alpha dt + beta dW + dW gamma vs x1 (x) x2
IdentityReport check_rank_one_propagation(const ProbeTuple& p1, const ProbeTuple& p2,
                                          const LinearCoefficients& coeffs, int t0,
                                          double tolerance,
                                          const SchemeOptions& scheme = {});

// <P, x1 (x) x2>_HS = <P x2, x1>, and the two diffusion-pairing translations
IdentityReport check_trace_dictionary(const OperatorProcess& q, const ProbeTuple& p1,
                                      const ProbeTuple& p2, const LinearCoefficients& coeffs,
                                      int t0, double tolerance,
                                      const SchemeOptions& scheme = {});

// least-squares slope of log(err) vs log(dt); needs >= 3 positive samples
double fit_order(const std::vector<double>& dts, const std::vector<double>& errors);

} // namespace qsc
