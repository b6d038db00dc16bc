#pragma once

#include <variant>
#include <vector>

#include "qmall/state.hpp"
#include "qmall/weyl_calculus.hpp"

namespace qmall {

struct WeylPrim {
    HVec h1;
    HVec h2;
};

struct QuantPrim {
    DirectionPair h;
    Symbol phi;
};

using Primitive = std::variant<WeylPrim, QuantPrim>;

struct SmoothTerm {
    cplx weight{1.0};
    std::vector<Primitive> factors;  // ordered product; empty = identity
};

// Formal sums of ordered products of Weyl operators and quantized symbols.
class SmoothElement {
public:
    SmoothElement() = default;

    static SmoothElement identity();
    static SmoothElement weyl(const HVec& h1, const HVec& h2);
    static SmoothElement weyl(const DirectionPair& h) { return weyl(h.k1, h.k2); }
    static SmoothElement quant(const DirectionPair& h, const Symbol& phi);

    const std::vector<SmoothTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    bool weyl_only() const;

    SmoothElement operator*(const SmoothElement& other) const;
    SmoothElement operator*(cplx s) const;
    SmoothElement operator+(const SmoothElement& other) const;
    SmoothElement& operator+=(const SmoothElement& other);
    // reversed product of adjoint primitives: U(h)* = U(−h), O_h(φ)* = O_h(φ̄)
    SmoothElement adjoint() const;

    void add_term(SmoothTerm t) { terms_.push_back(std::move(t)); }

private:
    std::vector<SmoothTerm> terms_;
};

FockOp evaluate(const FockSpace& space, const Primitive& p, const QuadratureSpec& quad = {});
FockOp evaluate(const FockSpace& space, const SmoothElement& s, const QuadratureSpec& quad = {});

struct ModuleTerm {
    FockOp f;
    DirectionPair k;
};

// Σ F_i ⊗ k_i, kept unreduced.
class ModuleElement {
public:
    ModuleElement() = default;
    explicit ModuleElement(std::vector<ModuleTerm> terms) : terms_(std::move(terms)) {}

    // id ⊗ k
    static ModuleElement direction(const FockSpace& space, const DirectionPair& k);

    const std::vector<ModuleTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add(FockOp f, DirectionPair k) { terms_.push_back({std::move(f), std::move(k)}); }
    // (F,k) ↦ (F*, k̄)
    ModuleElement conj() const;
    // X·u and u·X act on the operator slot
    ModuleElement left_mul(const FockOp& x) const;
    ModuleElement right_mul(const FockOp& x) const;
    ModuleElement operator+(const ModuleElement& other) const;
    ModuleElement operator*(cplx s) const;

private:
    std::vector<ModuleTerm> terms_;
};

// ⟨A,B⟩ = Σ F_i* G_j (⟨h_i1,k_j1⟩ + ⟨h_i2,k_j2⟩)
FockOp module_inner(const ModuleElement& a, const ModuleElement& b);

using SymbolicModuleElement = std::vector<std::pair<SmoothElement, DirectionPair>>;

// D by the Leibniz rule: DU(h) = iU(h)⊗h, DO_h(φ) = O_h(∂xφ)⊗(h1,0) + O_h(∂yφ)⊗(0,h2).
SymbolicModuleElement derive(const SmoothElement& s);
ModuleElement evaluate(const FockSpace& space, const SymbolicModuleElement& u, const QuadratureSpec& quad = {});
// (s, k) ↦ (s*, k̄)
SymbolicModuleElement conjugate(const SymbolicModuleElement& u);

// Iterated derivatives D^n s = Σ F ⊗ k^1 ⊗ … ⊗ k^n
struct TensorTerm {
    SmoothElement f;
    std::vector<DirectionPair> dirs;
};
using SymbolicTensor = std::vector<TensorTerm>;

struct EvaluatedTensorTerm {
    FockOp f;
    std::vector<DirectionPair> dirs;
};

SymbolicTensor derive_n(const SmoothElement& s, int n);
std::vector<EvaluatedTensorTerm> evaluate(const FockSpace& space, const SymbolicTensor& t, const QuadratureSpec& quad = {});
// Σ F_i* G_j Π_l (⟨h^i_l1,k^j_l1⟩ + ⟨h^i_l2,k^j_l2⟩)
FockOp tensor_inner(const std::vector<EvaluatedTensorTerm>& a, const std::vector<EvaluatedTensorTerm>& b);

// ‖Oψ‖² + Σ_{j=1}^n |⟨ψ, ⟨D^jO, D^jO⟩ψ⟩|
double sobolev_seminorm_squared(const FockSpace& space, const SmoothElement& s, const FockVec& psi, int n,
                                const QuadratureSpec& quad = {});

// D_k B = (i/2)[Q(k1) − P(k2), B]
FockOp derive_direction(const FockSpace& space, const DirectionPair& k, const FockOp& b);

enum class GradientSide { right, left, two_sided };

// →D_u O = ⟨ū, DO⟩
FockOp right_gradient(const FockSpace& space, const ModuleElement& u, const SmoothElement& o,
                      const QuadratureSpec& quad = {});
// O←D_u = ⟨conj(DO), u⟩
FockOp left_gradient(const FockSpace& space, const SmoothElement& o, const ModuleElement& u,
                     const QuadratureSpec& quad = {});
// O1 (→D_u O2) + (O1←D_u) O2
FockOp two_sided_gradient(const FockSpace& space, const SmoothElement& o1, const ModuleElement& u,
                          const SmoothElement& o2, const QuadratureSpec& quad = {});
// args: one element for right/left, two for two_sided
FockOp gradient(const FockSpace& space, GradientSide side, const ModuleElement& u,
                const std::vector<SmoothElement>& args, const QuadratureSpec& quad = {});

cplx expectation(const State& state, const FockOp& x);

struct IdentitySides {
    cplx lhs;
    cplx rhs;
    double residual() const { return std::abs(lhs - rhs); }
};

// 𝔼(⟨k̄,DO⟩) against (1/2)𝔼({P(k1)+Q(k2), O})
IdentitySides integration_by_parts(const FockSpace& space, const State& state, const DirectionPair& k,
                                   const SmoothElement& o, const QuadratureSpec& quad = {});
// (1/2)𝔼({P(k1)+Q(k2), O1⋯On}) against Σ_m 𝔼(O1⋯⟨k̄,DO_m⟩⋯On)
IdentitySides product_integration_by_parts(const FockSpace& space, const State& state, const DirectionPair& k,
                                           const std::vector<SmoothElement>& factors, const QuadratureSpec& quad = {});

// D_k(evaluate s) against ⟨id⊗k̄, evaluate(Ds)⟩
FockOp frechet_difference(const FockSpace& space, const DirectionPair& k, const SmoothElement& s,
                          const QuadratureSpec& quad = {});

}  // namespace qmall
