#pragma once

#include <vector>

#include "qmall/fock_space.hpp"

namespace qmall {

enum class LadderKind { create, annihilate, position, momentum, number };

// a†(h) = Σ h_j A†_j (linear), a(h) = Σ conj(h_j) A_j (antilinear),
// Q(h) = a(h̄)+a†(h), P(h) = i(a(h̄)−a†(h)); number ignores h.
SparseOp ladder_sparse(const FockSpace& space, LadderKind kind, const HVec& h);
FockOp ladder(const FockSpace& space, LadderKind kind, const HVec& h);

inline FockOp creation(const FockSpace& s, const HVec& h) { return ladder(s, LadderKind::create, h); }
inline FockOp annihilation(const FockSpace& s, const HVec& h) { return ladder(s, LadderKind::annihilate, h); }
inline FockOp position(const FockSpace& s, const HVec& h) { return ladder(s, LadderKind::position, h); }
inline FockOp momentum(const FockSpace& s, const HVec& h) { return ladder(s, LadderKind::momentum, h); }

// P(h1)+Q(h2)
SparseOp field_sparse(const FockSpace& space, const HVec& h1, const HVec& h2);

// U(h1,h2) = exp(i(P(h1)+Q(h2))) of the truncated generator.
FockOp weyl(const FockSpace& space, const HVec& h1, const HVec& h2);
inline FockOp weyl(const FockSpace& space, const DirectionPair& h) { return weyl(space, h.k1, h.k2); }

struct ExponentialAction {
    cplx scalar;
    HVec argument;
};

// U(h1,h2)ℰ(f) = scalar·ℰ(argument) on the untruncated Fock space.
ExponentialAction weyl_on_exponential(const HVec& h1, const HVec& h2, const HVec& f);

// Phase c with U(h)U(k) = c·U(h1+k1, h2+k2).
cplx weyl_composition_phase(const DirectionPair& h, const DirectionPair& k);

struct GaussianSpec {
    std::vector<double> lambdas;
    double t = 1.0;
    void validate() const;
};

struct SecondQuantization {
    FockOp rho;  // Γ(T_t), unnormalized
    double z_truncated = 0.0;
    double z_exact = 0.0;
    double tail_gap = 0.0;  // z_exact − z_truncated
    double tail_bound = 0.0;  // analytic bound on tail_gap
};

SecondQuantization second_quantization(const FockSpace& space, const GaussianSpec& spec);

// Closed form Π_j exp(−|u h1_j + i v h2_j|²/2 · coth(tλ_j/2)) of tr(ρ_t U(uh1,vh2))/Z_t.
cplx thermal_characteristic(const GaussianSpec& spec, const HVec& h1, const HVec& h2, double u, double v);

FockOp commutator(const FockOp& a, const FockOp& b);
FockOp anticommutator(const FockOp& a, const FockOp& b);
// ‖[a, x]‖ in Frobenius norm, one column at a time.
double commutator_norm(const SparseOp& a, const FockOp& x);

}  // namespace qmall
