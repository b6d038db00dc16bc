#include "qmall/divergence.hpp"

#include <sstream>

#include "qmall/operators.hpp"

namespace qmall {

namespace {

HVec creation_arg(const DirectionPair& h) { return h.k2 - I_unit * h.k1; }
// a(conj(h2 + ih1))
HVec annihilation_arg(const DirectionPair& h) { return (h.k2 + I_unit * h.k1).conjugate(); }

FockOp identity_of(const FockSpace& space) { return FockOp::Identity(space.dim(), space.dim()); }

void check_order(std::size_t n, int max_order) {
    if (n == 0 || static_cast<int>(n) > max_order) {
        std::ostringstream msg;
        msg << "divergence order " << n << " outside 1.." << max_order;
        throw DomainError(msg.str());
    }
}

void check_field(const FockSpace& space, const ElementaryField& u, const char* what) {
    for (const auto& t : u.terms()) {
        require_same_size(space, t.f.rows(), t.f.cols(), what);
        if (t.k.modes() != space.modes()) throw DimensionMismatch(std::string(what) + ": direction size differs from modes");
    }
}

}  // namespace

FockOp divergence_def(const FockSpace& space, const ElementaryField& u) {
    check_field(space, u, "divergence_def");
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (const auto& t : u.terms()) {
        // ½{S,F} − [Y,F] = (½S − Y)F + F(½S + Y)
        const SparseOp s = 0.5 * field_sparse(space, t.k.k1, t.k.k2);
        const SparseOp y = (0.5 * I_unit) * (ladder_sparse(space, LadderKind::position, t.k.k1) -
                                             ladder_sparse(space, LadderKind::momentum, t.k.k2));
        out += SparseOp(s - y) * t.f;
        out += t.f * SparseOp(s + y);
    }
    return out;
}

FockOp divergence_wick(const FockSpace& space, const ElementaryField& u) {
    check_field(space, u, "divergence_wick");
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (const auto& t : u.terms()) {
        const SparseOp c = ladder_sparse(space, LadderKind::create, creation_arg(t.k));
        const SparseOp a = ladder_sparse(space, LadderKind::annihilate, annihilation_arg(t.k));
        out += c * t.f;
        out += t.f * a;
    }
    return out;
}

cplx divergence_matrix_rhs(const FockSpace& space, const ElementaryField& u, const HVec& k1, const HVec& k2) {
    check_field(space, u, "divergence_matrix_rhs");
    const FockVec e1 = exponential_vector(space, k1);
    const FockVec e2 = exponential_vector(space, k2);
    cplx out = 0.0;
    for (const auto& t : u.terms()) {
        const cplx c = inner_h(k1, creation_arg(t.k)) + inner_h(conj(k2), t.k.k2 + I_unit * t.k.k1);
        out += c * e1.dot(t.f * e2);
    }
    return out;
}

ElementaryField derive_field(const FockSpace& space, const DirectionPair& h, const ElementaryField& u) {
    ElementaryField out;
    for (const auto& t : u.terms()) out.add(derive_direction(space, h, t.f), t.k);
    return out;
}

FockOp commutation_residual(const FockSpace& space, const DirectionPair& h, const ElementaryField& u) {
    return derive_direction(space, h, divergence_def(space, u)) - divergence_def(space, derive_field(space, h, u)) -
           module_inner(ModuleElement::direction(space, h.conj()), u);
}

ProductFormula product_formula(const FockSpace& space, const SmoothElement& f, const ElementaryField& u,
                               ProductSide side, const QuadratureSpec& quad) {
    const FockOp fo = evaluate(space, f, quad);
    const FockOp du = divergence_def(space, u);
    ProductFormula out;
    out.correction = FockOp::Zero(space.dim(), space.dim());
    for (const auto& t : u.terms()) {
        const FockOp s(field_sparse(space, t.k.k1, t.k.k2));
        if (side == ProductSide::left) {
            out.correction += 0.5 * commutator(s, fo) * t.f;
        } else {
            out.correction += 0.5 * t.f * commutator(fo, s);
        }
    }
    if (side == ProductSide::left) {
        out.direct = divergence_def(space, u.left_mul(fo));
        out.formula = fo * du - left_gradient(space, f, u, quad) + out.correction;
    } else {
        out.direct = divergence_def(space, u.right_mul(fo));
        out.formula = du * fo - right_gradient(space, u, f, quad) + out.correction;
    }
    return out;
}

IdentitySides duality(const FockSpace& space, const State& state, const SmoothElement& a, const ElementaryField& u,
                      const SmoothElement& b, const QuadratureSpec& quad) {
    const FockOp lhs = evaluate(space, a, quad) * divergence_def(space, u) * evaluate(space, b, quad);
    return {state.expect(lhs), state.expect(two_sided_gradient(space, a, u, b, quad))};
}

NoGo nogo_counterexample(const FockSpace& space, const DirectionPair& k) {
    const HVec f = k.k1 + I_unit * k.k2;
    if (f.norm() == 0.0) throw DomainError("nogo_counterexample: k1 + ik2 must be nonzero");
    if (space.cutoff() < 1) throw DomainError("nogo_counterexample: cutoff must be at least 1");
    const FockVec omega = vacuum(space);
    const FockVec one = creation(space, f) * omega;
    NoGo out;
    out.b = omega * one.adjoint();
    out.value = omega.dot(derive_direction(space, k, out.b) * omega);
    out.expected = -0.5 * I_unit * inner_h(f, f);
    return out;
}

FockOp iterated_divergence(const FockSpace& space, const std::vector<DirectionPair>& dirs, int max_order) {
    check_order(dirs.size(), max_order);
    FockOp x = identity_of(space);
    for (const auto& h : dirs) x = divergence_def(space, ElementaryField({{x, h}}));
    return x;
}

FockOp wick_subset_sum(const FockSpace& space, const std::vector<DirectionPair>& dirs, int max_order) {
    check_order(dirs.size(), max_order);
    const std::size_t n = dirs.size();
    std::vector<SparseOp> cr;
    std::vector<SparseOp> an;
    for (const auto& h : dirs) {
        cr.push_back(ladder_sparse(space, LadderKind::create, creation_arg(h)));
        an.push_back(ladder_sparse(space, LadderKind::annihilate, annihilation_arg(h)));
    }
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        FockOp term = identity_of(space);
        // creators to the left, annihilators to the right
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (std::size_t{1} << j)) term = FockOp(cr[j] * term);
        for (std::size_t j = 0; j < n; ++j)
            if (!(mask & (std::size_t{1} << j))) term = FockOp(term * an[j]);
        out += term;
    }
    return out;
}

FockOp wick_product_linear(const FockSpace& space, const std::vector<DirectionPair>& dirs, int max_order) {
    check_order(dirs.size(), max_order);
    // X ⋄ (a†(g) + a(ḡ')) = a†(g)X + X a(ḡ')
    FockOp x = identity_of(space);
    for (auto it = dirs.rbegin(); it != dirs.rend(); ++it) {
        const SparseOp c = ladder_sparse(space, LadderKind::create, creation_arg(*it));
        const SparseOp a = ladder_sparse(space, LadderKind::annihilate, annihilation_arg(*it));
        FockOp next = c * x;
        next += x * a;
        x = std::move(next);
    }
    return x;
}

}  // namespace qmall
