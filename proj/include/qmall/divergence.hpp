#pragma once

#include <vector>

#include "qmall/malliavin.hpp"

namespace qmall {

// u = Σ F_j ⊗ h^j
using ElementaryField = ModuleElement;

// (1/2)Σ{P(h1)+Q(h2), F} − Σ D_h F
FockOp divergence_def(const FockSpace& space, const ElementaryField& u);
// Σ a†(h2 − ih1) F + F a(conj(h2 + ih1))
FockOp divergence_wick(const FockSpace& space, const ElementaryField& u);
// Σ (⟨k1, h2 − ih1⟩ + ⟨k̄2, h2 + ih1⟩) ⟨ℰ(k1), F ℰ(k2)⟩, without forming δ(u)
cplx divergence_matrix_rhs(const FockSpace& space, const ElementaryField& u, const HVec& k1, const HVec& k2);

// D_h u acting on the operator slots
ElementaryField derive_field(const FockSpace& space, const DirectionPair& h, const ElementaryField& u);

// D_h δ(u) − δ(D_h u) − ⟨id⊗h̄, u⟩
FockOp commutation_residual(const FockSpace& space, const DirectionPair& h, const ElementaryField& u);

enum class ProductSide { left, right };

struct ProductFormula {
    FockOp direct;   // δ(Fu) or δ(uF)
    FockOp formula;  // Fδ(u) − F←D_u + ½Σ[S_j,F]F_j  or  δ(u)F − →D_uF + ½ΣF_j[F,S_j]
    FockOp correction;  // the commutator sum alone
};

// S_j = P(h^j_1) + Q(h^j_2)
ProductFormula product_formula(const FockSpace& space, const SmoothElement& f, const ElementaryField& u,
                               ProductSide side, const QuadratureSpec& quad = {});

// 𝔼(Aδ(u)B) against 𝔼(A↔D_u B); equal when A and B commute with every S_j
IdentitySides duality(const FockSpace& space, const State& state, const SmoothElement& a, const ElementaryField& u,
                      const SmoothElement& b, const QuadratureSpec& quad = {});

struct NoGo {
    FockOp b;         // ψ ↦ ⟨k1+ik2, ψ⟩Ω
    cplx value;       // 𝔼(D_k B)
    cplx expected;    // −(i/2)⟨k1+ik2, k1+ik2⟩
};

NoGo nogo_counterexample(const FockSpace& space, const DirectionPair& k);

inline constexpr int default_max_divergence_order = 4;

// X_0 = I, X_j = δ(X_{j−1} ⊗ h^j)
FockOp iterated_divergence(const FockSpace& space, const std::vector<DirectionPair>& dirs,
                           int max_order = default_max_divergence_order);
// Σ_{I⊆{1..n}} Π_{j∈I} a†(h^j_2 − ih^j_1) Π_{j∉I} a(conj(h^j_2 + ih^j_1))
FockOp wick_subset_sum(const FockSpace& space, const std::vector<DirectionPair>& dirs,
                       int max_order = default_max_divergence_order);
// (P(h^1_1)+Q(h^1_2)) ⋄ … ⋄ (P(h^n_1)+Q(h^n_2)) from a†(g)⋄X = X⋄a†(g) = a†(g)X, a(g)⋄X = X⋄a(g) = Xa(g)
FockOp wick_product_linear(const FockSpace& space, const std::vector<DirectionPair>& dirs,
                           int max_order = default_max_divergence_order);

}  // namespace qmall
