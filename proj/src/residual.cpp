#include "qmall/residual.hpp"

#include <cmath>

namespace qmall {

double Rng::uniform(double lo, double hi) {
    // 53 random bits, independent of the standard library's distribution implementation
    const double x = static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
    return lo + (hi - lo) * x;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

HVec Rng::real_direction(int modes, double norm) {
    HVec h(modes);
    for (int j = 0; j < modes; ++j) h(j) = normal();
    const double n = h.norm();
    return n > 0.0 ? HVec(h * (norm / n)) : HVec(HVec::Zero(modes));
}

HVec Rng::complex_direction(int modes, double norm) {
    HVec h(modes);
    for (int j = 0; j < modes; ++j) {
        const double re = normal();
        h(j) = cplx(re, normal());
    }
    const double n = h.norm();
    return n > 0.0 ? HVec(h * (norm / n)) : HVec(HVec::Zero(modes));
}

HVec Rng::real_ball(int modes, double max_norm) { return real_direction(modes, max_norm * uniform(0.05, 1.0)); }

HVec Rng::complex_ball(int modes, double max_norm) {
    return complex_direction(modes, max_norm * uniform(0.05, 1.0));
}

FockOp Rng::random_matrix(Index n) {
    FockOp m(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double re = normal();
            m(i, j) = cplx(re, normal());
        }
    }
    return m;
}

FockOp Rng::random_hermitian(Index n) {
    const FockOp m = random_matrix(n);
    return 0.5 * (m + m.adjoint());
}

ProbeSet make_probes(const FockSpace& space, int count, std::uint64_t seed, double radius) {
    Rng rng(seed);
    ProbeSet p;
    p.columns.resize(space.dim(), count);
    for (int c = 0; c < count; ++c) {
        HVec k = c == 0 ? HVec(HVec::Zero(space.modes())) : rng.complex_ball(space.modes(), radius);
        FockVec v = exponential_vector(space, k);
        p.columns.col(c) = v / v.norm();
        p.args.push_back(k);
    }
    return p;
}

double probe_residual(const FockOp& r, const ProbeSet& probes) {
    const FockOp m = probes.columns.adjoint() * r * probes.columns;
    return m.cwiseAbs().maxCoeff();
}

double interior_residual(const FockSpace& space, const FockOp& r, int d) {
    const Eigen::VectorXcd mask = interior_mask(space, d).cast<cplx>();
    return (mask.asDiagonal() * r * mask.asDiagonal()).norm();
}

double frobenius(const FockOp& r) { return r.norm(); }

}  // namespace qmall
