#include "qmall/operators.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qmall {

namespace {

void require_modes(const FockSpace& space, const HVec& h, const char* what) {
    if (h.size() != space.modes()) {
        std::ostringstream msg;
        msg << what << ": direction has " << h.size() << " modes, space has " << space.modes();
        throw DimensionMismatch(msg.str());
    }
}

bool is_real(const HVec& h) { return h.size() == 0 || h.imag().cwiseAbs().maxCoeff() == 0.0; }

SparseOp raising_combination(const FockSpace& space, const HVec& h) {
    SparseOp out(space.dim(), space.dim());
    for (int j = 0; j < space.modes(); ++j) {
        if (h(j) != cplx(0.0)) out += h(j) * space.raising(j);
    }
    return out;
}

FockOp weyl_per_mode(const FockSpace& space, const HVec& h1, const HVec& h2) {
    const FockSpace single(1, space.cutoff());
    std::vector<FockOp> factors;
    for (int j = 0; j < space.modes(); ++j) {
        factors.push_back(weyl(single, h1.segment(j, 1), h2.segment(j, 1)));
    }
    const Index n = space.dim();
    FockOp u(n, n);
    for (Index b = 0; b < n; ++b) {
        const Occupation& nb = space.tuple_of(b);
        for (Index a = 0; a < n; ++a) {
            const Occupation& na = space.tuple_of(a);
            cplx c = 1.0;
            for (int j = 0; j < space.modes() && c != cplx(0.0); ++j) {
                c *= factors[static_cast<std::size_t>(j)](na[static_cast<std::size_t>(j)],
                                                          nb[static_cast<std::size_t>(j)]);
            }
            u(a, b) = c;
        }
    }
    return u;
}

}  // namespace

SparseOp ladder_sparse(const FockSpace& space, LadderKind kind, const HVec& h) {
    const Index n = space.dim();
    if (kind == LadderKind::number) {
        SparseOp out(n, n);
        for (int j = 0; j < space.modes(); ++j) out += space.raising(j) * space.lowering(j);
        return out;
    }
    require_modes(space, h, "ladder");
    switch (kind) {
        case LadderKind::create:
            return raising_combination(space, h);
        case LadderKind::annihilate:
            return SparseOp(raising_combination(space, h).adjoint());
        case LadderKind::position: {
            SparseOp up = raising_combination(space, h);
            SparseOp down = SparseOp(raising_combination(space, h.conjugate()).adjoint());
            return down + up;
        }
        case LadderKind::momentum: {
            SparseOp up = raising_combination(space, h);
            SparseOp down = SparseOp(raising_combination(space, h.conjugate()).adjoint());
            return I_unit * (down - up);
        }
        default:
            break;
    }
    throw DomainError("unknown ladder kind");
}

FockOp ladder(const FockSpace& space, LadderKind kind, const HVec& h) {
    return FockOp(ladder_sparse(space, kind, h));
}

SparseOp field_sparse(const FockSpace& space, const HVec& h1, const HVec& h2) {
    return ladder_sparse(space, LadderKind::momentum, h1) + ladder_sparse(space, LadderKind::position, h2);
}

FockOp weyl(const FockSpace& space, const HVec& h1, const HVec& h2) {
    require_modes(space, h1, "weyl");
    require_modes(space, h2, "weyl");
    const Index n = space.dim();
    if (h1.isZero(0.0) && h2.isZero(0.0)) return FockOp::Identity(n, n);
    if (space.truncation() == Truncation::per_mode && space.modes() > 1) return weyl_per_mode(space, h1, h2);

    const FockOp gen(field_sparse(space, h1, h2));
    if (is_real(h1) && is_real(h2)) {
        Eigen::SelfAdjointEigenSolver<FockOp> es(gen);
        const Eigen::VectorXcd phases = (I_unit * es.eigenvalues().cast<cplx>()).array().exp();
        FockOp u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        const double defect = (u.adjoint() * u - FockOp::Identity(n, n)).norm();
        if (!(defect <= 1e-9)) throw Error("weyl: exponential lost unitarity");
        return u;
    }
    const FockOp skew = I_unit * gen;
    return skew.exp();
}

ExponentialAction weyl_on_exponential(const HVec& h1, const HVec& h2, const HVec& f) {
    if (h1.size() != h2.size() || h1.size() != f.size()) throw DimensionMismatch("weyl_on_exponential: mode counts differ");
    const HVec beta = h1 - I_unit * h2;
    const cplx exponent = -(f.transpose() * beta)(0) - 0.5 * ((h1.transpose() * h1)(0) + (h2.transpose() * h2)(0));
    return {std::exp(exponent), f + h1 + I_unit * h2};
}

cplx weyl_composition_phase(const DirectionPair& h, const DirectionPair& k) {
    const cplx s = (h.k2.transpose() * k.k1)(0) - (h.k1.transpose() * k.k2)(0);
    return std::exp(I_unit * s);
}

void GaussianSpec::validate() const {
    if (lambdas.empty()) throw DomainError("GaussianSpec: no eigenvalues");
    if (!(t > 0.0)) throw DomainError("GaussianSpec: t must be positive");
    for (double l : lambdas) {
        if (!(l > 0.0)) throw DomainError("GaussianSpec: eigenvalues must be positive");
    }
}

SecondQuantization second_quantization(const FockSpace& space, const GaussianSpec& spec) {
    spec.validate();
    if (static_cast<int>(spec.lambdas.size()) != space.modes()) {
        throw DimensionMismatch("second_quantization: one eigenvalue per mode required");
    }
    SecondQuantization out;
    Eigen::VectorXd diag(space.dim());
    for (Index i = 0; i < space.dim(); ++i) {
        const Occupation& n = space.tuple_of(i);
        double e = 0.0;
        for (int j = 0; j < space.modes(); ++j) e += n[static_cast<std::size_t>(j)] * spec.t * spec.lambdas[static_cast<std::size_t>(j)];
        diag(i) = std::exp(-e);
    }
    out.rho = diag.cast<cplx>().asDiagonal();
    out.z_truncated = diag.sum();
    double z = 1.0;
    double qmax = 0.0;
    for (double l : spec.lambdas) {
        const double q = std::exp(-spec.t * l);
        z /= (1.0 - q);
        qmax = std::max(qmax, q);
    }
    out.z_exact = z;
    out.tail_gap = z - out.z_truncated;

    const int m = space.modes();
    const int N = space.cutoff();
    if (space.truncation() == Truncation::per_mode) {
        double inside = 1.0;
        for (double l : spec.lambdas) {
            const double q = std::exp(-spec.t * l);
            inside *= (1.0 - std::pow(q, N + 1)) / (1.0 - q);
        }
        out.tail_bound = z - inside;
    } else {
        // Σ_{d>N} C(d+m−1, m−1) q_max^d
        double bound = 0.0;
        for (int d = N + 1; d < N + 100000; ++d) {
            const double logc = std::lgamma(d + m + 0.0) - std::lgamma(d + 1.0) - std::lgamma(m + 0.0);
            const double term = std::exp(logc + d * std::log(qmax));
            bound += term;
            if (term < 1e-20 * bound) break;
        }
        out.tail_bound = bound;
    }
    return out;
}

cplx thermal_characteristic(const GaussianSpec& spec, const HVec& h1, const HVec& h2, double u, double v) {
    spec.validate();
    if (h1.size() != static_cast<Index>(spec.lambdas.size()) || h2.size() != h1.size()) {
        throw DimensionMismatch("thermal_characteristic: mode count mismatch");
    }
    double exponent = 0.0;
    for (Index j = 0; j < h1.size(); ++j) {
        const cplx alpha = u * h1(j) + I_unit * v * h2(j);
        const double coth = 1.0 / std::tanh(0.5 * spec.t * spec.lambdas[static_cast<std::size_t>(j)]);
        exponent -= 0.5 * std::norm(alpha) * coth;
    }
    return std::exp(exponent);
}

FockOp commutator(const FockOp& a, const FockOp& b) { return a * b - b * a; }
FockOp anticommutator(const FockOp& a, const FockOp& b) { return a * b + b * a; }

double commutator_norm(const SparseOp& a, const FockOp& x) {
    if (a.rows() != x.rows() || a.cols() != x.cols()) throw DimensionMismatch("commutator_norm: size mismatch");
    double sum = 0.0;
    Eigen::VectorXcd col(x.rows());
    for (Index c = 0; c < x.cols(); ++c) {
        col.noalias() = a * x.col(c);
        for (SparseOp::InnerIterator it(a, c); it; ++it) col -= it.value() * x.col(it.row());
        sum += col.squaredNorm();
    }
    return std::sqrt(sum);
}

}  // namespace qmall
