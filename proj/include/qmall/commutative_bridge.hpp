#pragma once

#include <vector>

#include "qmall/operators.hpp"

namespace qmall {

// The functional e^{iW(h)} on the Gaussian side, h real.
struct ClassicalExponential {
    HVec h;
};

// e^{iW(h)} e^{iW(k)} = phase · e^{iW(h+k)}
struct BridgeProduct {
    ClassicalExponential value;
    cplx phase = 1.0;
};

BridgeProduct product(const ClassicalExponential& a, const ClassicalExponential& b);

// Multiplication by e^{iW(h)} as U(0, h).
FockOp embed(const FockSpace& space, const ClassicalExponential& c);

// U(0,h)Ω = e^{−‖h‖²/2} ℰ(ih), untruncated.
ExponentialAction vacuum_image(const ClassicalExponential& c);

// D_{(0,k)} U(0,h) − i⟨k,h⟩ U(0,h)
FockOp classical_derivative_check(const FockSpace& space, const HVec& k, const HVec& h);

// max ‖[U(0,h_a), U(0,h_b)]‖ over all pairs
double commutativity_residual(const FockSpace& space, const std::vector<ClassicalExponential>& family);

}  // namespace qmall
