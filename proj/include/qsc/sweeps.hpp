#pragma once

#include "qsc/io.hpp"

namespace qsc {

// One refinement sweep: per-level dt and relative defect, with the fitted order.
struct SweepResult {
    std::vector<double> dts;
    std::vector<double> errors;
    double order = 0.0;

    bool all_below(double tol) const;
    // order >= 0.9, or defect at machine scale on every level
    bool passes_order(double exact_tol) const;
    void finish(); // fit the order
};

// scalar forward benchmark x(T) -> e^{lambda T} Omega
SweepResult scalar_forward_sweep(const std::vector<int>& levels, double horizon,
                                 double lambda);

// |P(0)_vac - e^{2 lambda T}| via the representation formula at N steps
double scalar_p0_error(int n_steps, double lambda);

// representation_P vs backward recursion over all anchors, profile probes
SweepResult p_consistency_sweep(const std::vector<int>& levels, double horizon,
                                const AdjointPreset& preset, DriverMode mode,
                                const SchemeOptions& scheme = {});

// linear BQSDE duality defect, several draws per level (max of |defect|/scale)
SweepResult duality_defect_sweep(const std::vector<int>& levels, double horizon,
                                 uint64_t seed, int draws);

// seven-term transposition identity defect at anchor t0 = 0 (mean over probe
// pairs); no relaxed assembly, so refined levels stay cheap
SweepResult transposition_defect_sweep(const std::vector<int>& levels, double horizon,
                                       const AdjointPreset& preset, int n_probes,
                                       DriverMode mode, const SchemeOptions& scheme = {});

// weak rank-one propagation defect at anchor t0 = 0 (mean over probe pairs)
SweepResult propagation_defect_sweep(const std::vector<int>& levels, double horizon,
                                     uint64_t seed, int n_probes,
                                     const SchemeOptions& scheme = {});

struct RelaxedSweep {
    SweepResult transposition;
    SweepResult relaxed;
    SweepResult uniqueness; // route (ii) vs route (i) relaxed actions
    double adjoint_defect = 0.0; // Q^{(t)}(0,0,.)^* vs Qhat^{(t)}(0,0,.)
    double gram_gap = 0.0;       // informational
    double apriori_min = 0.0;    // min/max of the monitored constant across levels
    double apriori_max = 0.0;
};

RelaxedSweep relaxed_identity_sweep(const std::vector<int>& levels, double horizon,
                                    const AdjointPreset& preset, int probes_per_anchor,
                                    DriverMode mode, const SchemeOptions& scheme = {});

struct GalerkinResult {
    std::vector<GalerkinRow> rows;
    bool monotone = false; // nonincreasing within factor 1.05
    double full_rank_error = 0.0;
};

GalerkinResult galerkin_sweep(int n_modes, double horizon, const AdjointPreset& preset,
                              int n_probes, DriverMode mode);

} // namespace qsc
