#pragma once

#include <cstdint>
#include <string>

#include "qsc/identities.hpp"

namespace qsc {

// Named, seeded constructions of coefficients, data and probes.
//
// The "scalar", "field", "word" and "random" presets are built from grid-free
// ingredients (the constant, W(t_k)-words, and fields of fixed trigonometric
// profiles restricted to [0, t_k]), so the same (name, seed) is comparable
// across dyadic refinements; "dense" draws raw random matrices and is only
// meaningful at a fixed size.
//
// name ∈ {zero, scalar, field, word, random, identity, dense, rank-one}
// (identity/dense/rank-one apply to terminal and source data).

struct PresetError : std::runtime_error {
    explicit PresetError(const std::string& what) : std::runtime_error(what) {}
};

OperatorProcess coefficient_preset(const ModeGrid& grid, const std::string& name,
                                   double lambda, uint64_t seed);

LinearCoefficients coefficient_pair(const ModeGrid& grid, const std::string& d_name,
                                    double d_lambda, const std::string& f_name,
                                    double f_lambda, uint64_t seed);

Mat terminal_preset(const ModeGrid& grid, const std::string& name, double scale,
                    uint64_t seed);

// operator-valued running source (H of the adjoint equation, or g of the
// linear BQSDE); adapted per step
OperatorProcess operator_source_preset(const ModeGrid& grid, const std::string& name,
                                       double scale, uint64_t seed);

struct AdjointPreset {
    std::string d_name = "zero";
    double d_lambda = 0.0;
    std::string f_name = "zero";
    double f_lambda = 0.0;
    std::string terminal_name = "identity";
    double terminal_scale = 1.0;
    std::string source_name = "zero";
    double source_scale = 1.0;
    uint64_t seed = 2;
};

AdjointData make_adjoint_data(const ModeGrid& grid, const AdjointPreset& preset);

// adapted vector-valued source; name ∈ {zero, profile, random}
VectorProcess vector_source_preset(const ModeGrid& grid, const std::string& name,
                                   double scale, uint64_t seed);

// element of L^2(C_{t0}); name ∈ {vacuum, profile, random}
Vec initial_preset(const ModeGrid& grid, const std::string& name, double scale, int t0,
                   uint64_t seed);

// (xi, u, v) with profile (grid-comparable) or random per-step entries
ProbeTuple probe_preset(const ModeGrid& grid, int t0, uint64_t seed,
                        bool intrinsic = true);

} // namespace qsc
