#include "qmall/fock_space.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qmall {

bool DirectionPair::is_real(double tol) const {
    return k1.imag().cwiseAbs().maxCoeff() <= tol && k2.imag().cwiseAbs().maxCoeff() <= tol;
}

namespace {

void enumerate_degree(int modes, int cap, int remaining, Occupation& current, int pos,
                      std::vector<Occupation>& out) {
    if (pos == modes - 1) {
        if (remaining <= cap) {
            current[static_cast<std::size_t>(pos)] = remaining;
            out.push_back(current);
        }
        return;
    }
    for (int n = 0; n <= std::min(remaining, cap); ++n) {
        current[static_cast<std::size_t>(pos)] = n;
        enumerate_degree(modes, cap, remaining - n, current, pos + 1, out);
    }
}

}  // namespace

std::size_t predicted_dimension(int modes, int cutoff, Truncation truncation) {
    constexpr double cap = 1e18;
    double d = 1.0;
    if (truncation == Truncation::total) {
        for (int i = 1; i <= modes; ++i) d = d * (cutoff + i) / i;
    } else {
        for (int i = 0; i < modes; ++i) d *= (cutoff + 1);
    }
    if (d >= cap) return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(std::llround(d));
}

FockSpace::FockSpace(int modes, int cutoff, Truncation truncation, std::size_t dimension_limit)
    : modes_(modes), cutoff_(cutoff), truncation_(truncation) {
    if (modes < 1) throw DomainError("mode count must be at least 1");
    if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
    const std::size_t dim = predicted_dimension(modes, cutoff, truncation);
    if (dim > dimension_limit) {
        std::ostringstream msg;
        msg << "Fock space with " << modes << " modes and cutoff " << cutoff << " has dimension " << dim
            << ", above the limit " << dimension_limit;
        throw DimensionLimitError(msg.str());
    }

    const int max_degree = truncation == Truncation::total ? cutoff : cutoff * modes;
    const int cap = cutoff;
    Occupation current(static_cast<std::size_t>(modes), 0);
    basis_.reserve(dim);
    for (int d = 0; d <= max_degree; ++d) {
        const std::size_t before = basis_.size();
        enumerate_degree(modes, cap, d, current, 0, basis_);
        for (std::size_t i = before; i < basis_.size(); ++i) degree_.push_back(d);
    }
    for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], static_cast<Index>(i));

    const Index n = this->dim();
    for (int j = 0; j < modes; ++j) {
        std::vector<Eigen::Triplet<cplx>> trips;
        for (Index col = 0; col < n; ++col) {
            Occupation up = basis_[static_cast<std::size_t>(col)];
            const int nj = up[static_cast<std::size_t>(j)];
            up[static_cast<std::size_t>(j)] = nj + 1;
            auto it = index_.find(up);
            if (it != index_.end()) trips.emplace_back(it->second, col, std::sqrt(static_cast<double>(nj + 1)));
        }
        SparseOp raise(n, n);
        raise.setFromTriplets(trips.begin(), trips.end());
        raise.makeCompressed();
        SparseOp lower = SparseOp(raise.adjoint());
        lower.makeCompressed();
        raising_.push_back(std::move(raise));
        lowering_.push_back(std::move(lower));
    }
}

Index FockSpace::index_of(const Occupation& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) throw DomainError("occupation tuple is outside the truncated basis");
    return it->second;
}

FockSpace build_space(int modes, int cutoff, std::size_t dimension_limit) {
    return FockSpace(modes, cutoff, Truncation::total, dimension_limit);
}

cplx inner_h(const HVec& h, const HVec& k) {
    if (h.size() != k.size()) throw DimensionMismatch("inner_h: mode counts differ");
    return h.dot(k);
}

HVec conj(const HVec& h) { return h.conjugate(); }

HVec basis_vector(int modes, int j) {
    HVec e = HVec::Zero(modes);
    e(j) = 1.0;
    return e;
}

FockVec vacuum(const FockSpace& space) {
    FockVec v = FockVec::Zero(space.dim());
    v(0) = 1.0;
    return v;
}

FockVec exponential_vector(const FockSpace& space, const HVec& k) {
    if (k.size() != space.modes()) throw DimensionMismatch("exponential_vector: mode count mismatch");
    FockVec v(space.dim());
    for (Index i = 0; i < space.dim(); ++i) {
        const Occupation& n = space.tuple_of(i);
        cplx c = 1.0;
        for (int j = 0; j < space.modes(); ++j) {
            const int nj = n[static_cast<std::size_t>(j)];
            for (int p = 1; p <= nj; ++p) c *= k(j) / std::sqrt(static_cast<double>(p));
        }
        v(i) = c;
    }
    return v;
}

cplx fock_inner(const FockVec& v, const FockVec& w) {
    if (v.size() != w.size()) throw DimensionMismatch("fock_inner: dimension mismatch");
    return v.dot(w);
}

Eigen::VectorXd interior_mask(const FockSpace& space, int d) {
    if (d < 0) throw DomainError("interior degree must be nonnegative");
    const int max_degree = space.truncation() == Truncation::total ? space.cutoff()
                                                                   : space.cutoff() * space.modes();
    if (d > max_degree) throw DomainError("interior degree exceeds the cutoff");
    Eigen::VectorXd mask(space.dim());
    for (Index i = 0; i < space.dim(); ++i) mask(i) = space.degree(i) <= d ? 1.0 : 0.0;
    return mask;
}

FockOp interior_projector(const FockSpace& space, int d) {
    return interior_mask(space, d).cast<cplx>().asDiagonal();
}

double truncation_tail_bound(double norm, int N) {
    if (norm == 0.0) return 0.0;
    const double x = norm * norm;
    // log of x^{N+1}/(N+1)! to stay finite for large N
    const double logv = (N + 1) * std::log(x) - std::lgamma(N + 2.0) + x;
    return std::exp(logv);
}

void require_same_size(const FockSpace& space, Index rows, Index cols, const char* what) {
    if (rows != space.dim() || cols != space.dim()) {
        std::ostringstream msg;
        msg << what << ": operator is " << rows << "x" << cols << ", space dimension is " << space.dim();
        throw DimensionMismatch(msg.str());
    }
}

}  // namespace qmall
