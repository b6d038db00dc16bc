#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "qmall/types.hpp"

namespace qmall {

using Occupation = std::vector<int>;

// total: Σ n_j ≤ N.  per_mode: every n_j ≤ N (tensor product of single-mode cutoffs).
enum class Truncation { total, per_mode };

inline constexpr std::size_t default_dimension_limit = 20000;

class FockSpace {
public:
    FockSpace(int modes, int cutoff, Truncation truncation = Truncation::total,
              std::size_t dimension_limit = default_dimension_limit);

    int modes() const { return modes_; }
    int cutoff() const { return cutoff_; }
    Truncation truncation() const { return truncation_; }
    Index dim() const { return static_cast<Index>(basis_.size()); }

    const Occupation& tuple_of(Index i) const { return basis_.at(static_cast<std::size_t>(i)); }
    // Throws DomainError for tuples outside the truncated basis.
    Index index_of(const Occupation& n) const;
    bool contains(const Occupation& n) const { return index_.count(n) != 0; }
    int degree(Index i) const { return degree_[static_cast<std::size_t>(i)]; }

    // Mode-j raising matrix A†_j with √(n_j+1) amplitudes, and its adjoint.
    const SparseOp& raising(int mode) const { return raising_.at(static_cast<std::size_t>(mode)); }
    const SparseOp& lowering(int mode) const { return lowering_.at(static_cast<std::size_t>(mode)); }

    bool same_as(const FockSpace& other) const {
        return modes_ == other.modes_ && cutoff_ == other.cutoff_ && truncation_ == other.truncation_;
    }

private:
    int modes_;
    int cutoff_;
    Truncation truncation_;
    std::vector<Occupation> basis_;
    std::vector<int> degree_;
    std::map<Occupation, Index> index_;
    std::vector<SparseOp> raising_;
    std::vector<SparseOp> lowering_;
};

// Number of basis states without enumerating them (saturates at SIZE_MAX).
std::size_t predicted_dimension(int modes, int cutoff, Truncation truncation);

FockSpace build_space(int modes, int cutoff, std::size_t dimension_limit = default_dimension_limit);

cplx inner_h(const HVec& h, const HVec& k);
HVec conj(const HVec& h);
HVec basis_vector(int modes, int j);

FockVec vacuum(const FockSpace& space);
// Unnormalized: coefficient Π k_j^{n_j}/√(Π n_j!) on every basis tuple.
FockVec exponential_vector(const FockSpace& space, const HVec& k);
cplx fock_inner(const FockVec& v, const FockVec& w);

// Projector onto total degree ≤ d.
FockOp interior_projector(const FockSpace& space, int d);
Eigen::VectorXd interior_mask(const FockSpace& space, int d);

// Upper bound norm^{2(N+1)}/(N+1)!·e^{norm²} for Σ_{n>N} norm^{2n}/n!.
double truncation_tail_bound(double norm, int N);

void require_same_size(const FockSpace& space, Index rows, Index cols, const char* what);

}  // namespace qmall
