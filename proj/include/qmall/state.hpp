#pragma once

#include <variant>

#include "qmall/fock_space.hpp"

namespace qmall {

struct VectorState {
    FockVec omega;
};

struct DensityState {
    FockOp rho;
};

// Φ(X) = ⟨ω,Xω⟩ or tr(ρX).
class State {
public:
    static State vacuum(const FockSpace& space);
    // Throws DomainError unless ‖ω‖ = 1 within 1e-12.
    static State vector(FockVec omega);
    // Normalizes ω first.
    static State normalized(const FockVec& omega);
    // Throws DomainError unless Hermitian, PSD and trace one within 1e-10.
    static State density(FockOp rho);

    bool is_vector() const { return std::holds_alternative<VectorState>(value_); }
    const FockVec& omega() const { return std::get<VectorState>(value_).omega; }
    const FockOp& rho() const { return std::get<DensityState>(value_).rho; }
    Index dim() const;

    cplx expect(const FockOp& x) const;
    FockOp density_matrix() const;

private:
    explicit State(std::variant<VectorState, DensityState> v) : value_(std::move(v)) {}
    std::variant<VectorState, DensityState> value_;
};

}  // namespace qmall
