#include <doctest.h>

#include <cmath>

#include "qmall/residual.hpp"
#include "qmall/weyl_calculus.hpp"

using namespace qmall;

namespace {

DirectionPair pair_of(const HVec& a, const HVec& b) { return {a, b}; }

double op_norm(const FockOp& m) { return Eigen::JacobiSVD<FockOp>(m).singularValues()(0); }

}  // namespace

TEST_CASE("WeylSampler matches weyl on every path") {
    Rng rng(21);
    const FockSpace one = build_space(1, 12);
    const FockSpace two = build_space(2, 6);
    const FockSpace tensor(2, 3, Truncation::per_mode);
    const HVec e1 = basis_vector(2, 0);
    const HVec dir = rng.real_direction(2, 1.0);
    struct Case {
        const FockSpace* space;
        HVec h1;
        HVec h2;
        bool rotation;
    };
    const std::vector<Case> cases{
        {&one, HVec::Constant(1, 0.7), HVec::Constant(1, -0.4), true},
        {&one, HVec::Constant(1, -0.7), HVec::Zero(1), true},
        {&two, HVec(0.6 * dir), HVec(-0.3 * dir), true},
        {&two, HVec(-0.8 * e1), HVec(0.5 * e1), true},
        {&two, rng.real_direction(2, 0.6), rng.real_direction(2, 0.5), false},
        {&tensor, HVec(0.5 * basis_vector(2, 1)), HVec(0.4 * basis_vector(2, 1)), true},
        {&tensor, rng.real_direction(2, 0.6), rng.real_direction(2, 0.5), false},
    };
    for (const auto& c : cases) {
        const WeylSampler sampler(*c.space, c.h1, c.h2);
        CHECK(sampler.uses_rotation() == c.rotation);
        const FockSpace& s = *c.space;
        Rng local(5);
        const State vec = State::normalized(exponential_vector(s, local.complex_ball(s.modes(), 0.6)));
        FockOp rho = local.random_matrix(s.dim());
        rho = rho * rho.adjoint();
        rho /= rho.trace();
        const State dens = State::density(rho);
        auto sq = second_quantization(s, GaussianSpec{std::vector<double>(static_cast<std::size_t>(s.modes()), 1.0), 1.0});
        const State thermal = State::density(sq.rho / sq.z_truncated);
        std::vector<std::pair<double, double>> nodes{{0.3, -1.2}, {-2.0, 0.5}, {0.0, 0.0}, {1.5, 1.5}, {0.0, -0.7}};
        const auto cv = sampler.expectations(vec, nodes);
        const auto cd = sampler.expectations(dens, nodes);
        const auto ct = sampler.expectations(thermal, nodes);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto [u, v] = nodes[i];
            const FockOp w = weyl(s, HVec(u * c.h1), HVec(v * c.h2));
            CHECK((sampler.at(u, v) - w).norm() < 1e-11);
            CHECK(std::abs(cv[i] - vec.expect(w)) < 1e-12);
            CHECK(std::abs(cd[i] - dens.expect(w)) < 1e-12);
            CHECK(std::abs(ct[i] - thermal.expect(w)) < 1e-12);
        }
    }
}

TEST_CASE("plane wave quantization is the Weyl operator") {
    const FockSpace s = build_space(2, 5);
    Rng rng(22);
    const DirectionPair h{rng.real_direction(2, 0.8), rng.real_direction(2, 0.6)};
    const FockOp o = quantize(s, h, Symbol::plane_wave(0.7, -1.3));
    CHECK((o - weyl(s, HVec(0.7 * h.k1), HVec(-1.3 * h.k2))).norm() == 0.0);
    CHECK((quantize(s, h, Symbol::constant(1.0)) - FockOp::Identity(s.dim(), s.dim())).norm() == 0.0);
}

TEST_CASE("quantization is linear and respects conjugation") {
    const FockSpace s = build_space(1, 12);
    const DirectionPair h = pair_of(HVec::Constant(1, 0.8), HVec::Constant(1, 0.6));
    const Symbol a = Symbol::gaussian_packet(0.8, 0.2, -0.3, 0.4, 0.1);
    const Symbol b = Symbol::gaussian_packet(1.5, -0.1, 0.0, 0.0, -0.6);
    const cplx al(0.3, -1.1);
    const cplx be(0.9, 0.2);
    const QuadratureSpec q{0.0, 65};
    const FockOp lhs = quantize(s, h, a * al + b * be, q);
    const FockOp rhs = al * quantize(s, h, a, q) + be * quantize(s, h, b, q);
    CHECK((lhs - rhs).norm() < 1e-12);
    const FockOp oa = quantize(s, h, a, q);
    CHECK((oa.adjoint() - quantize(s, h, a.conjugate(), q)).norm() < 1e-12);
    const FockOp real = quantize(s, h, Symbol::gaussian_packet(0.9, 0.3, -0.2), q);
    CHECK((real - real.adjoint()).norm() < 1e-12);
}

TEST_CASE("quadrature domain too small is refused") {
    const FockSpace s = build_space(1, 6);
    const DirectionPair h = pair_of(HVec::Constant(1, 1.0), HVec::Constant(1, 1.0));
    CHECK_THROWS_AS(quantize(s, h, Symbol::gaussian_packet(1.0), QuadratureSpec{2.0, 33}), DomainError);
    CHECK_THROWS_AS(quantize(s, h, Symbol::gaussian_packet(1.0), QuadratureSpec{0.0, 32}), DomainError);
    const DirectionPair c{HVec::Constant(1, cplx(0, 1)), HVec::Constant(1, 1.0)};
    CHECK_THROWS_AS(quantize(s, c, Symbol::gaussian_packet(1.0)), DomainError);
}

TEST_CASE("trapezoid convergence for a Gaussian symbol") {
    const FockSpace s = build_space(1, 8);
    const DirectionPair h = pair_of(HVec::Constant(1, 0.5), HVec::Constant(1, 0.5));
    const Symbol phi = Symbol::gaussian_packet(1.0, 0.3, 0.1, 0.2, -0.4);
    const FockOp ref = quantize(s, h, phi, QuadratureSpec{0.0, 129});
    const double e9 = (quantize(s, h, phi, QuadratureSpec{0.0, 9}) - ref).norm();
    const double e17 = (quantize(s, h, phi, QuadratureSpec{0.0, 17}) - ref).norm();
    const double e33 = (quantize(s, h, phi, QuadratureSpec{0.0, 33}) - ref).norm();
    CHECK(e17 < e9 / 4.0);
    CHECK(e33 < std::max(e17 / 4.0, 1e-12));
}

TEST_CASE("narrow packets approach the plane wave") {
    const FockSpace s = build_space(1, 12);
    const DirectionPair h = pair_of(HVec::Constant(1, 0.6), HVec::Constant(1, 0.5));
    const ProbeSet probes = make_probes(s, 10, 3);
    const FockOp target = quantize(s, h, Symbol::plane_wave(0.4, -0.3));
    double previous = 1e300;
    for (double alpha : {0.05, 0.01, 0.002}) {
        const FockOp o = quantize(s, h, Symbol::gaussian_packet(alpha, 0.0, 0.0, 0.4, -0.3), QuadratureSpec{0.0, 65});
        const double r = probe_residual(o - target, probes);
        CHECK(r < previous);
        previous = r;
    }
    CHECK(previous < 0.05);
}

TEST_CASE("Girsanov conjugation of Weyl operators and quantized symbols") {
    const FockSpace s = build_space(1, 16);
    const ProbeSet probes = make_probes(s, 12, 4);
    const DirectionPair h = pair_of(HVec::Constant(1, 0.5), HVec::Constant(1, 0.4));
    const DirectionPair k = pair_of(HVec::Constant(1, 0.4), HVec::Constant(1, -0.3));
    CHECK((conjugate_by_weyl(s, pair_of(HVec::Zero(1), HVec::Zero(1)), weyl(s, h)) - weyl(s, h)).norm() == 0.0);
    const double x0 = 0.6;
    const double y0 = -0.9;
    const FockOp u = weyl(s, HVec(x0 * h.k1), HVec(y0 * h.k2));
    const cplx phase = std::exp(I_unit * (x0 * inner_h(k.k1, h.k1) + y0 * inner_h(k.k2, h.k2)));
    CHECK(probe_residual(conjugate_by_weyl(s, k, u) - phase * u, probes) < 1e-10);
    CHECK(probe_residual(conjugate_by_weyl(s, k, u) - std::conj(phase) * u, probes) > 1e-2);

    const Symbol phi = Symbol::gaussian_packet(0.4, 0.1, -0.2, 0.3, 0.2);
    const QuadratureSpec q{0.0, 65};
    const FockOp lhs = conjugate_by_weyl(s, k, quantize(s, h, phi, q));
    const FockOp rhs = quantize(s, h, phi.translate(inner_h(k.k1, h.k1).real(), inner_h(k.k2, h.k2).real()), q);
    CHECK(probe_residual(lhs - rhs, probes) < 1e-9);
}

TEST_CASE("integration by parts operator identity for complex directions") {
    Rng rng(23);
    const FockSpace s = build_space(2, 10);
    const ProbeSet probes = make_probes(s, 12, 5);
    const DirectionPair h{rng.real_direction(2, 0.4), rng.real_direction(2, 0.4)};
    const DirectionPair k{rng.complex_direction(2, 0.7), rng.complex_direction(2, 0.4)};
    const Symbol phi = Symbol::gaussian_packet(0.3, 0.2, 0.1, -0.3, 0.4);
    const QuadratureSpec q{0.0, 33};
    const FockOp o = quantize(s, h, phi, q);
    const FockOp lhs = 0.5 * I_unit * commutator(position(s, conj(k.k1)) - momentum(s, conj(k.k2)), o);
    const FockOp rhs = quantize(s, h, phi.dx() * inner_h(k.k1, h.k1) + phi.dy() * inner_h(k.k2, h.k2), q);
    CHECK(probe_residual(lhs - rhs, probes) < 1e-8);
}

TEST_CASE("regularity generators differentiate quantized symbols") {
    const FockSpace s = build_space(1, 16);
    const ProbeSet probes = make_probes(s, 12, 6);
    const HVec e = basis_vector(1, 0);
    const DirectionPair h{HVec(0.5 * e), HVec(0.5 * e)};
    const DirectionPair k{e, HVec::Zero(1)};
    const DirectionPair l{HVec::Zero(1), e};
    const auto gen = regularity_generators(s, h, k, l);
    CHECK((gen.a - 0.5 * Eigen::Matrix2cd::Identity()).norm() < 1e-15);
    const Symbol phi = Symbol::gaussian_packet(0.3, 0.2, -0.1, 0.3, 0.0);
    const QuadratureSpec q{0.0, 65};
    const FockOp o = quantize(s, h, phi, q);
    CHECK(probe_residual(commutator(gen.x1, o) - quantize(s, h, phi.dx(), q), probes) < 1e-9);
    CHECK(probe_residual(commutator(gen.x2, o) - quantize(s, h, phi.dy(), q), probes) < 1e-9);

    const DirectionPair h2{HVec::Constant(1, 0.35), HVec::Constant(1, 0.55)};
    const DirectionPair k2{HVec::Constant(1, 0.3), HVec::Constant(1, 0.8)};
    const DirectionPair l2{HVec::Constant(1, -0.6), HVec::Constant(1, 0.2)};
    const auto g2 = regularity_generators(s, h2, k2, l2);
    const FockOp o2 = quantize(s, h2, phi, q);
    CHECK(probe_residual(commutator(g2.x1, o2) - quantize(s, h2, phi.dx(), q), probes) < 1e-9);
    CHECK(probe_residual(commutator(g2.x2, o2) - quantize(s, h2, phi.dy(), q), probes) < 1e-9);
    CHECK_THROWS_AS(regularity_generators(s, h, k, k), SingularDirectionError);
}

TEST_CASE("pair expectation equals the state applied to the quantized operator") {
    const FockSpace s = build_space(1, 14);
    const DirectionPair h = pair_of(HVec::Constant(1, 0.9), HVec::Constant(1, 0.7));
    const Symbol phi = Symbol::gaussian_packet(0.6, 0.3, -0.2, 0.5, 0.1) + Symbol::plane_wave(0.3, 0.2) * 0.5;
    const QuadratureSpec q{0.0, 65};
    const State vac = State::vacuum(s);
    CHECK(std::abs(pair_expectation(s, vac, h, phi, q) - vac.expect(quantize(s, h, phi, q))) < 1e-12);
    const auto sq = second_quantization(s, GaussianSpec{{1.0}, 0.7});
    const State th = State::density(sq.rho / sq.z_truncated);
    CHECK(std::abs(pair_expectation(s, th, h, phi, q) - th.expect(quantize(s, h, phi, q))) < 1e-12);
    CHECK(std::abs(pair_expectation(s, vac, h, Symbol::constant(1.0), q) - 1.0) < 1e-15);
    (void)op_norm;
}

TEST_CASE("weighted sums match node-by-node accumulation") {
    Rng rng(24);
    const FockSpace two = build_space(2, 6);
    const FockSpace one = build_space(1, 10);
    const HVec dir = rng.real_direction(2, 1.0);
    std::vector<std::pair<double, double>> nodes;
    std::vector<cplx> coeffs;
    for (int i = 0; i < 7; ++i) {
        nodes.emplace_back(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        coeffs.emplace_back(rng.normal(), rng.normal());
    }
    for (const auto& [space, h1, h2] :
         {std::tuple{&two, HVec(0.6 * dir), HVec(-0.3 * dir)}, std::tuple{&one, HVec(HVec::Constant(1, 0.5)), HVec(HVec::Constant(1, -0.8))},
          std::tuple{&two, rng.real_direction(2, 0.6), rng.real_direction(2, 0.5)}}) {
        const WeylSampler sampler(*space, h1, h2);
        FockOp direct = FockOp::Zero(space->dim(), space->dim());
        for (std::size_t i = 0; i < nodes.size(); ++i) direct += coeffs[i] * sampler.at(nodes[i].first, nodes[i].second);
        CHECK((sampler.weighted_sum(nodes, coeffs) - direct).norm() < 1e-12);
    }
}
