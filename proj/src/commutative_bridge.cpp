#include "qmall/commutative_bridge.hpp"

#include "qmall/malliavin.hpp"

namespace qmall {

namespace {

void require_real_vector(const HVec& h, const char* what) {
    if (!h.imag().isZero(0.0)) throw DomainError(std::string(what) + ": direction must be real");
}

}  // namespace

BridgeProduct product(const ClassicalExponential& a, const ClassicalExponential& b) {
    if (a.h.size() != b.h.size()) throw DimensionMismatch("product: mode counts differ");
    const HVec z = HVec::Zero(a.h.size());
    return {{a.h + b.h}, weyl_composition_phase({z, a.h}, {z, b.h})};
}

FockOp embed(const FockSpace& space, const ClassicalExponential& c) {
    require_real_vector(c.h, "embed");
    return weyl(space, HVec::Zero(c.h.size()), c.h);
}

ExponentialAction vacuum_image(const ClassicalExponential& c) {
    require_real_vector(c.h, "vacuum_image");
    const HVec z = HVec::Zero(c.h.size());
    return weyl_on_exponential(z, c.h, z);
}

FockOp classical_derivative_check(const FockSpace& space, const HVec& k, const HVec& h) {
    require_real_vector(k, "classical_derivative_check");
    require_real_vector(h, "classical_derivative_check");
    const FockOp u = embed(space, {h});
    return derive_direction(space, {HVec::Zero(k.size()), k}, u) - I_unit * inner_h(k, h) * u;
}

double commutativity_residual(const FockSpace& space, const std::vector<ClassicalExponential>& family) {
    std::vector<FockOp> ops;
    ops.reserve(family.size());
    for (const auto& c : family) ops.push_back(embed(space, c));
    double worst = 0.0;
    for (std::size_t a = 0; a < ops.size(); ++a)
        for (std::size_t b = a + 1; b < ops.size(); ++b) worst = std::max(worst, (ops[a] * ops[b] - ops[b] * ops[a]).norm());
    return worst;
}

}  // namespace qmall
