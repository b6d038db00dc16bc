#include "qmall/malliavin.hpp"

#include <cmath>

#include "qmall/operators.hpp"

namespace qmall {

namespace {

cplx pair_inner(const DirectionPair& a, const DirectionPair& b) { return inner_h(a.k1, b.k1) + inner_h(a.k2, b.k2); }

Primitive adjoint_primitive(const Primitive& p) {
    if (const auto* w = std::get_if<WeylPrim>(&p)) return WeylPrim{-w->h1, -w->h2};
    const auto& q = std::get<QuantPrim>(p);
    return QuantPrim{q.h, q.phi.conjugate()};
}

// D of one primitive as a list of (replacement term, direction)
std::vector<std::pair<SmoothTerm, DirectionPair>> derive_primitive(const Primitive& p) {
    std::vector<std::pair<SmoothTerm, DirectionPair>> out;
    if (const auto* w = std::get_if<WeylPrim>(&p)) {
        out.push_back({SmoothTerm{I_unit, {p}}, DirectionPair{w->h1, w->h2}});
        return out;
    }
    const auto& q = std::get<QuantPrim>(p);
    const HVec zero = HVec::Zero(q.h.modes());
    out.push_back({SmoothTerm{1.0, {QuantPrim{q.h, q.phi.dx()}}}, DirectionPair{q.h.k1, zero}});
    out.push_back({SmoothTerm{1.0, {QuantPrim{q.h, q.phi.dy()}}}, DirectionPair{zero, q.h.k2}});
    return out;
}

FockOp identity_of(const FockSpace& space) { return FockOp::Identity(space.dim(), space.dim()); }

}  // namespace

SmoothElement SmoothElement::identity() {
    SmoothElement s;
    s.terms_.push_back({1.0, {}});
    return s;
}

SmoothElement SmoothElement::weyl(const HVec& h1, const HVec& h2) {
    if (h1.size() != h2.size()) throw DimensionMismatch("WeylPrim: h1 and h2 differ in size");
    if (!DirectionPair{h1, h2}.is_real()) throw DomainError("WeylPrim needs real directions");
    SmoothElement s;
    s.terms_.push_back({1.0, {WeylPrim{h1, h2}}});
    return s;
}

SmoothElement SmoothElement::quant(const DirectionPair& h, const Symbol& phi) {
    require_real(h, "QuantPrim");
    SmoothElement s;
    s.terms_.push_back({1.0, {QuantPrim{h, phi}}});
    return s;
}

bool SmoothElement::weyl_only() const {
    for (const auto& t : terms_)
        for (const auto& f : t.factors)
            if (!std::holds_alternative<WeylPrim>(f)) return false;
    return true;
}

SmoothElement SmoothElement::operator*(const SmoothElement& other) const {
    SmoothElement out;
    for (const auto& a : terms_) {
        for (const auto& b : other.terms_) {
            SmoothTerm t{a.weight * b.weight, a.factors};
            t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
            out.terms_.push_back(std::move(t));
        }
    }
    return out;
}

SmoothElement SmoothElement::operator*(cplx s) const {
    SmoothElement out = *this;
    for (auto& t : out.terms_) t.weight *= s;
    return out;
}

SmoothElement& SmoothElement::operator+=(const SmoothElement& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

SmoothElement SmoothElement::operator+(const SmoothElement& other) const {
    SmoothElement out = *this;
    out += other;
    return out;
}

SmoothElement SmoothElement::adjoint() const {
    SmoothElement out;
    for (const auto& t : terms_) {
        SmoothTerm a{std::conj(t.weight), {}};
        for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it) a.factors.push_back(adjoint_primitive(*it));
        out.terms_.push_back(std::move(a));
    }
    return out;
}

FockOp evaluate(const FockSpace& space, const Primitive& p, const QuadratureSpec& quad) {
    if (const auto* w = std::get_if<WeylPrim>(&p)) return weyl(space, w->h1, w->h2);
    const auto& q = std::get<QuantPrim>(p);
    return quantize(space, q.h, q.phi, quad);
}

FockOp evaluate(const FockSpace& space, const SmoothElement& s, const QuadratureSpec& quad) {
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (const auto& t : s.terms()) {
        if (t.factors.empty()) {
            out.diagonal().array() += t.weight;
            continue;
        }
        FockOp prod = evaluate(space, t.factors.front(), quad);
        for (std::size_t i = 1; i < t.factors.size(); ++i) prod = prod * evaluate(space, t.factors[i], quad);
        out += t.weight * prod;
    }
    return out;
}

ModuleElement ModuleElement::direction(const FockSpace& space, const DirectionPair& k) {
    if (k.modes() != space.modes()) throw DimensionMismatch("module direction: mode count differs from space");
    return ModuleElement({{identity_of(space), k}});
}

ModuleElement ModuleElement::conj() const {
    ModuleElement out;
    for (const auto& t : terms_) out.add(t.f.adjoint(), t.k.conj());
    return out;
}

ModuleElement ModuleElement::left_mul(const FockOp& x) const {
    ModuleElement out;
    for (const auto& t : terms_) out.add(x * t.f, t.k);
    return out;
}

ModuleElement ModuleElement::right_mul(const FockOp& x) const {
    ModuleElement out;
    for (const auto& t : terms_) out.add(t.f * x, t.k);
    return out;
}

ModuleElement ModuleElement::operator+(const ModuleElement& other) const {
    ModuleElement out = *this;
    out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
    return out;
}

ModuleElement ModuleElement::operator*(cplx s) const {
    ModuleElement out = *this;
    for (auto& t : out.terms_) t.f *= s;
    return out;
}

FockOp module_inner(const ModuleElement& a, const ModuleElement& b) {
    if (a.empty() || b.empty()) {
        const auto& any = a.empty() ? b : a;
        const Index n = any.empty() ? 0 : any.terms().front().f.rows();
        return FockOp::Zero(n, n);
    }
    const Index n = a.terms().front().f.rows();
    FockOp out = FockOp::Zero(n, n);
    for (const auto& x : a.terms()) {
        // Σ_j G_j ⟨h,k_j⟩ first, then one product with F*
        FockOp g = FockOp::Zero(n, n);
        for (const auto& y : b.terms()) {
            if (y.f.rows() != n || x.f.rows() != n) throw DimensionMismatch("module_inner: operator sizes differ");
            const cplx c = pair_inner(x.k, y.k);
            if (c != 0.0) g += c * y.f;
        }
        out += x.f.adjoint() * g;
    }
    return out;
}

SymbolicModuleElement derive(const SmoothElement& s) {
    SymbolicModuleElement out;
    for (const auto& t : s.terms()) {
        for (std::size_t m = 0; m < t.factors.size(); ++m) {
            for (auto& [rep, dir] : derive_primitive(t.factors[m])) {
                SmoothTerm nt{t.weight * rep.weight, {}};
                nt.factors.insert(nt.factors.end(), t.factors.begin(), t.factors.begin() + static_cast<long>(m));
                nt.factors.insert(nt.factors.end(), rep.factors.begin(), rep.factors.end());
                nt.factors.insert(nt.factors.end(), t.factors.begin() + static_cast<long>(m) + 1, t.factors.end());
                SmoothElement e;
                e.add_term(std::move(nt));
                out.emplace_back(std::move(e), dir);
            }
        }
    }
    return out;
}

ModuleElement evaluate(const FockSpace& space, const SymbolicModuleElement& u, const QuadratureSpec& quad) {
    ModuleElement out;
    for (const auto& [s, k] : u) out.add(evaluate(space, s, quad), k);
    return out;
}

SymbolicModuleElement conjugate(const SymbolicModuleElement& u) {
    SymbolicModuleElement out;
    for (const auto& [s, k] : u) out.emplace_back(s.adjoint(), k.conj());
    return out;
}

SymbolicTensor derive_n(const SmoothElement& s, int n) {
    if (n < 0) throw DomainError("derive_n: order must be nonnegative");
    SymbolicTensor cur{{s, {}}};
    for (int order = 0; order < n; ++order) {
        SymbolicTensor next;
        for (const auto& t : cur) {
            for (auto& [f, k] : derive(t.f)) {
                TensorTerm nt{std::move(f), t.dirs};
                nt.dirs.push_back(k);
                next.push_back(std::move(nt));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

std::vector<EvaluatedTensorTerm> evaluate(const FockSpace& space, const SymbolicTensor& t, const QuadratureSpec& quad) {
    std::vector<EvaluatedTensorTerm> out;
    out.reserve(t.size());
    for (const auto& x : t) out.push_back({evaluate(space, x.f, quad), x.dirs});
    return out;
}

FockOp tensor_inner(const std::vector<EvaluatedTensorTerm>& a, const std::vector<EvaluatedTensorTerm>& b) {
    if (a.empty() || b.empty()) {
        const auto& any = a.empty() ? b : a;
        const Index n = any.empty() ? 0 : any.front().f.rows();
        return FockOp::Zero(n, n);
    }
    const Index n = a.front().f.rows();
    FockOp out = FockOp::Zero(n, n);
    for (const auto& x : a) {
        FockOp g = FockOp::Zero(n, n);
        for (const auto& y : b) {
            if (x.dirs.size() != y.dirs.size()) throw DimensionMismatch("tensor_inner: orders differ");
            cplx c = 1.0;
            for (std::size_t l = 0; l < x.dirs.size(); ++l) c *= pair_inner(x.dirs[l], y.dirs[l]);
            if (c != 0.0) g += c * y.f;
        }
        out += x.f.adjoint() * g;
    }
    return out;
}

double sobolev_seminorm_squared(const FockSpace& space, const SmoothElement& s, const FockVec& psi, int n,
                                const QuadratureSpec& quad) {
    if (psi.size() != space.dim()) throw DimensionMismatch("sobolev_seminorm_squared: vector size differs from space");
    double out = (evaluate(space, s, quad) * psi).squaredNorm();
    for (int j = 1; j <= n; ++j) {
        const auto d = evaluate(space, derive_n(s, j), quad);
        out += std::abs(psi.dot(tensor_inner(d, d) * psi));
    }
    return out;
}

FockOp derive_direction(const FockSpace& space, const DirectionPair& k, const FockOp& b) {
    require_same_size(space, b.rows(), b.cols(), "derive_direction");
    const SparseOp y = (0.5 * I_unit) * (ladder_sparse(space, LadderKind::position, k.k1) -
                                         ladder_sparse(space, LadderKind::momentum, k.k2));
    FockOp out = y * b;
    out -= b * y;
    return out;
}

FockOp right_gradient(const FockSpace& space, const ModuleElement& u, const SmoothElement& o,
                      const QuadratureSpec& quad) {
    return module_inner(u.conj(), evaluate(space, derive(o), quad));
}

FockOp left_gradient(const FockSpace& space, const SmoothElement& o, const ModuleElement& u,
                     const QuadratureSpec& quad) {
    return module_inner(evaluate(space, derive(o), quad).conj(), u);
}

FockOp two_sided_gradient(const FockSpace& space, const SmoothElement& o1, const ModuleElement& u,
                          const SmoothElement& o2, const QuadratureSpec& quad) {
    return evaluate(space, o1, quad) * right_gradient(space, u, o2, quad) +
           left_gradient(space, o1, u, quad) * evaluate(space, o2, quad);
}

FockOp gradient(const FockSpace& space, GradientSide side, const ModuleElement& u,
                const std::vector<SmoothElement>& args, const QuadratureSpec& quad) {
    const std::size_t want = side == GradientSide::two_sided ? 2 : 1;
    if (args.size() != want) throw DomainError("gradient: wrong number of operator arguments");
    switch (side) {
        case GradientSide::right:
            return right_gradient(space, u, args[0], quad);
        case GradientSide::left:
            return left_gradient(space, args[0], u, quad);
        case GradientSide::two_sided:
            break;
    }
    return two_sided_gradient(space, args[0], u, args[1], quad);
}

cplx expectation(const State& state, const FockOp& x) { return state.expect(x); }

IdentitySides integration_by_parts(const FockSpace& space, const State& state, const DirectionPair& k,
                                   const SmoothElement& o, const QuadratureSpec& quad) {
    const FockOp ev = evaluate(space, o, quad);
    const FockOp grad = module_inner(ModuleElement::direction(space, k.conj()), evaluate(space, derive(o), quad));
    const FockOp x(field_sparse(space, k.k1, k.k2));
    return {state.expect(grad), 0.5 * state.expect(anticommutator(x, ev))};
}

IdentitySides product_integration_by_parts(const FockSpace& space, const State& state, const DirectionPair& k,
                                           const std::vector<SmoothElement>& factors, const QuadratureSpec& quad) {
    if (factors.empty()) throw DomainError("product_integration_by_parts: no factors");
    std::vector<FockOp> ev;
    std::vector<FockOp> grads;
    const ModuleElement dir = ModuleElement::direction(space, k.conj());
    for (const auto& f : factors) {
        ev.push_back(evaluate(space, f, quad));
        grads.push_back(module_inner(dir, evaluate(space, derive(f), quad)));
    }
    FockOp prod = ev.front();
    for (std::size_t i = 1; i < ev.size(); ++i) prod = prod * ev[i];
    const FockOp x(field_sparse(space, k.k1, k.k2));
    cplx rhs = 0.0;
    for (std::size_t m = 0; m < factors.size(); ++m) {
        FockOp p = m == 0 ? grads[0] : ev[0];
        for (std::size_t i = 1; i < ev.size(); ++i) p = p * (i == m ? grads[i] : ev[i]);
        rhs += state.expect(p);
    }
    return {0.5 * state.expect(anticommutator(x, prod)), rhs};
}

FockOp frechet_difference(const FockSpace& space, const DirectionPair& k, const SmoothElement& s,
                          const QuadratureSpec& quad) {
    const FockOp direct = derive_direction(space, k, evaluate(space, s, quad));
    const FockOp symbolic = module_inner(ModuleElement::direction(space, k.conj()), evaluate(space, derive(s), quad));
    return direct - symbolic;
}

}  // namespace qmall
