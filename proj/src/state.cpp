#include "qmall/state.hpp"

#include <cmath>
#include <sstream>

namespace qmall {

State State::vacuum(const FockSpace& space) { return State(VectorState{qmall::vacuum(space)}); }

State State::vector(FockVec omega) {
    const double n = omega.norm();
    if (std::abs(n - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "vector state has norm " << n << ", expected 1";
        throw DomainError(msg.str());
    }
    return State(VectorState{std::move(omega)});
}

State State::normalized(const FockVec& omega) {
    const double n = omega.norm();
    if (!(n > 0.0)) throw DomainError("vector state is zero");
    return State(VectorState{omega / n});
}

State State::density(FockOp rho) {
    if (rho.rows() != rho.cols()) throw DimensionMismatch("density matrix is not square");
    if ((rho - rho.adjoint()).norm() > 1e-10) throw DomainError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw DomainError("density matrix does not have unit trace");
    Eigen::SelfAdjointEigenSolver<FockOp> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw DomainError("density matrix is not positive semidefinite");
    return State(DensityState{std::move(rho)});
}

Index State::dim() const { return is_vector() ? omega().size() : rho().rows(); }

cplx State::expect(const FockOp& x) const {
    if (x.rows() != dim() || x.cols() != dim()) throw DimensionMismatch("expectation: operator size differs from state");
    if (is_vector()) return omega().dot(x * omega());
    // tr(ρX) without forming the product
    return (rho().transpose().array() * x.array()).sum();
}

FockOp State::density_matrix() const {
    if (is_vector()) return omega() * omega().adjoint();
    return rho();
}

}  // namespace qmall
