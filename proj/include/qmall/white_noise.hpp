#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmall/divergence.hpp"

namespace qmall {

// Bins [t_j, t_j+Δ), Δ = T/n; bin j is mode e_j.
struct TimeGrid {
    double T = 1.0;
    int n = 4;

    void validate() const;
    double delta() const { return T / n; }
    // √Δ·e_j
    HVec bin_mode(int j) const;
    // 1_{[0, t_j)} = √Δ·(e_0 + … + e_{j−1})
    HVec indicator(int j) const;
    TimeGrid refined() const { return {T, 2 * n}; }
    // coarse e_j ↦ (f_{2j} + f_{2j+1})/√2
    HVec refine_vector(const HVec& coarse) const;
};

// Per-bin integrands; empty operators count as zero.
struct StepProcessPair {
    std::vector<FockOp> x1;
    std::vector<FockOp> x2;
    bool adapted = false;  // declared; hp_integral verifies
};

StepProcessPair zero_process(const FockSpace& space, const TimeGrid& grid);

// Σ_j X¹_j ⊗ (√Δe_j, 0) + X²_j ⊗ (0, √Δe_j), skipping zero slots
ElementaryField process_to_field(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc);

struct AdaptednessWitness {
    bool adapted = true;
    int bin = -1;   // first violating (bin, mode), 0-based
    int mode = -1;
    double residual = 0.0;
};

// X_j must commute with a(e_i), a†(e_i) for every i ≥ j.
AdaptednessWitness adaptedness_check(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc,
                                     double tol = 1e-10);

// Σ_j X¹_j ΔP_j + X²_j ΔQ_j, no adaptedness requirement
FockOp riemann_sum(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc);

struct HPIntegral {
    FockOp value;
    double ordering_residual = 0.0;  // max ‖X_jΔ_j − Δ_jX_j‖
};

// Throws NotAdaptedError with the witness in the message.
HPIntegral hp_integral(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc);

struct BelavkinDecomposition {
    std::vector<FockOp> creation;      // G†_j = X²_j − iX¹_j
    std::vector<FockOp> annihilation;  // G_j = X²_j + iX¹_j
};

BelavkinDecomposition belavkin_decomposition(const FockSpace& space, const StepProcessPair& proc);
// Σ_j a†(√Δe_j) G†_j + G_j a(√Δe_j)
FockOp belavkin_operator(const FockSpace& space, const TimeGrid& grid, const BelavkinDecomposition& dec);

// {"T":…, "bins":n, "terms":[{"bin":j, "X1":spec, "X2":spec}], "adapted": optional bool}
// spec: "identity" | "zero" | {"h1":[…],"h2":[…]} | {"ladder": kind, "h":[…]} | [[[re,im],…],…]
struct ProcessFile {
    TimeGrid grid;
    nlohmann::json terms;
    std::optional<bool> declared_adapted;
};

ProcessFile parse_process(const nlohmann::json& j);
FockOp matrix_from_spec(const FockSpace& space, const nlohmann::json& spec);
StepProcessPair build_process(const FockSpace& space, const ProcessFile& file);

// Five adapted processes and one that is not (bin 2 integrand Q(e_2)), 4 bins.
std::vector<std::pair<std::string, nlohmann::json>> sample_process_corpus();

}  // namespace qmall
