#include <doctest.h>

#include <cmath>

#include "qmall/divergence.hpp"
#include "qmall/operators.hpp"
#include "qmall/residual.hpp"

using namespace qmall;

namespace {

struct Fixture {
    FockSpace space = build_space(2, 12);
    ProbeSet probes = make_probes(space, 20, 51);
    Rng rng{52};

    DirectionPair real_pair(double r) { return {rng.real_direction(2, r), rng.real_direction(2, r)}; }
    DirectionPair complex_pair(double r) { return {rng.complex_direction(2, r), rng.complex_direction(2, r)}; }
    ElementaryField weyl_field(int terms) {
        ElementaryField u;
        for (int i = 0; i < terms; ++i) u.add(weyl(space, real_pair(0.3)), complex_pair(0.5));
        return u;
    }
};

}  // namespace

TEST_CASE("deterministic fields give the field operator") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const DirectionPair h = fx.complex_pair(0.7);
    const ElementaryField u = ElementaryField::direction(s, h);
    const FockOp field(field_sparse(s, h.k1, h.k2));
    CHECK((divergence_def(s, u) - field).norm() < 1e-12);
    CHECK((divergence_wick(s, u) - field).norm() < 1e-12);
    CHECK(std::abs(vacuum(s).dot(divergence_def(s, u) * vacuum(s))) < 1e-15);
    CHECK(std::abs(divergence_matrix_rhs(s, u, HVec::Zero(2), HVec::Zero(2))) < 1e-15);
}

TEST_CASE("anticommutator and Wick forms agree") {
    Fixture fx;
    const FockSpace& s = fx.space;
    for (int t = 0; t < 5; ++t) {
        ElementaryField u;
        for (int i = 0; i < 3; ++i) u.add(fx.rng.random_matrix(s.dim()), fx.complex_pair(0.8));
        const FockOp d = divergence_def(s, u);
        CHECK((divergence_wick(s, u) - d).norm() <= 1e-12 * d.norm());
        CHECK((divergence_def(s, u.conj()) - d.adjoint()).norm() <= 1e-12 * d.norm());
    }
}

TEST_CASE("printed Wick annihilator argument is wrong") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const DirectionPair h = fx.real_pair(0.6);
    const FockOp f = weyl(s, fx.real_pair(0.4));
    const FockOp printed = creation(s, h.k2 - I_unit * h.k1) * f + f * annihilation(s, conj(h.k2 - I_unit * h.k1));
    const FockOp d = divergence_def(s, ElementaryField({{f, h}}));
    CHECK((printed - d).norm() > 1e-2 * d.norm());
}

TEST_CASE("exponential-vector matrix elements") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const ElementaryField u = fx.weyl_field(3);
    const FockOp d = divergence_def(s, u);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const HVec k1 = fx.rng.complex_ball(2, 0.5);
        const HVec k2 = fx.rng.complex_ball(2, 0.5);
        const cplx lhs = exponential_vector(s, k1).dot(d * exponential_vector(s, k2));
        const cplx rhs = divergence_matrix_rhs(s, u, k1, k2);
        worst = std::max(worst, std::abs(lhs - rhs));
        CHECK(std::abs(divergence_matrix_rhs(s, u.conj(), k2, k1) - std::conj(rhs)) < 1e-12);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("commutation with the directional derivative") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const DirectionPair h = fx.complex_pair(0.5);
    const ElementaryField det = ElementaryField::direction(s, fx.complex_pair(0.5));
    CHECK(interior_residual(s, commutation_residual(s, h, det), s.cutoff() - 2) < 1e-10);
    CHECK(probe_residual(commutation_residual(s, h, fx.weyl_field(2)), fx.probes) < 1e-8);
    const DirectionPair zero{HVec::Zero(2), HVec::Zero(2)};
    CHECK(commutation_residual(s, zero, fx.weyl_field(2)).norm() == 0.0);
}

TEST_CASE("product formulas") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const ElementaryField u = fx.weyl_field(2);
    for (ProductSide side : {ProductSide::left, ProductSide::right}) {
        const ProductFormula id = product_formula(s, SmoothElement::identity(), u, side);
        CHECK((id.direct - divergence_def(s, u)).norm() < 1e-12);
        CHECK((id.formula - divergence_def(s, u)).norm() < 1e-12);
        const SmoothElement f = SmoothElement::weyl(fx.real_pair(0.4)) + SmoothElement::weyl(fx.real_pair(0.3)) * 0.5;
        const ProductFormula p = product_formula(s, f, u, side);
        CHECK(probe_residual(p.direct - p.formula, fx.probes) < 1e-8);
        CHECK(probe_residual(p.correction, fx.probes) > 1e-3);
    }

    // F commuting with every S_j: the correction vanishes
    const DirectionPair h = fx.real_pair(0.5);
    ElementaryField par;
    par.add(weyl(s, fx.real_pair(0.3)), h);
    par.add(weyl(s, fx.real_pair(0.3)), h.scaled(-0.6));
    const ProductFormula c = product_formula(s, SmoothElement::weyl(h.scaled(0.7)), par, ProductSide::left);
    CHECK(c.correction.norm() < 1e-12);
    CHECK(probe_residual(c.direct - c.formula, fx.probes) < 1e-8);
}

TEST_CASE("printed ordering of the right product correction fails") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const ElementaryField u = fx.weyl_field(1);
    const SmoothElement f = SmoothElement::weyl(fx.real_pair(0.5));
    const ProductFormula p = product_formula(s, f, u, ProductSide::right);
    const FockOp fo = evaluate(s, f);
    const auto& t = u.terms()[0];
    const FockOp printed = 0.5 * commutator(fo, FockOp(field_sparse(s, t.k.k1, t.k.k2))) * t.f;
    const FockOp printed_formula = p.formula - p.correction + printed;
    CHECK(probe_residual(p.direct - p.formula, fx.probes) < 1e-8);
    CHECK(probe_residual(p.direct - printed_formula, fx.probes) > 1e-4);
}

TEST_CASE("duality in the commutant and its failure outside") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const State vac = State::vacuum(s);
    const DirectionPair h = fx.real_pair(0.5);
    ElementaryField u;
    u.add(weyl(s, fx.real_pair(0.3)), h);
    u.add(weyl(s, fx.real_pair(0.3)) * cplx(0.5, 0.2), h.scaled(0.4));
    const SmoothElement a = SmoothElement::weyl(h.scaled(0.6));
    const SmoothElement b = SmoothElement::weyl(h.scaled(-0.9));
    const IdentitySides ok = duality(s, vac, a, u, b);
    CHECK(ok.residual() < 1e-8);
    CHECK(std::abs(ok.lhs) > 1e-3);
    const SmoothElement a2 = SmoothElement::weyl(fx.real_pair(0.6));
    CHECK(duality(s, vac, a2, u, b).residual() > 1e-4);
}

TEST_CASE("no-go counterexample") {
    const FockSpace s = build_space(2, 6);
    const HVec e1 = basis_vector(2, 0);
    const HVec z = HVec::Zero(2);
    const NoGo a = nogo_counterexample(s, {e1, z});
    CHECK(std::abs(a.value - cplx(0, -0.5)) < 1e-10);
    CHECK(std::abs(a.value - a.expected) < 1e-10);
    const NoGo b = nogo_counterexample(s, {z, e1});
    CHECK(std::abs(b.value - cplx(0, -0.5)) < 1e-10);
    Rng rng(53);
    const DirectionPair k{rng.complex_direction(2, 0.7), rng.complex_direction(2, 0.6)};
    const NoGo c = nogo_counterexample(s, k);
    CHECK(std::abs(c.value - c.expected) < 1e-10);
    CHECK(std::abs(nogo_counterexample(s, k.scaled(2.0)).value - 4.0 * c.value) < 1e-10);
    CHECK((c.b * vacuum(s)).norm() == 0.0);
    CHECK_THROWS_AS(nogo_counterexample(s, {e1, HVec(I_unit * e1)}), DomainError);
}

TEST_CASE("iterated divergence is the Wick subset sum") {
    Fixture fx;
    const FockSpace& s = fx.space;
    const DirectionPair h = fx.complex_pair(0.6);
    CHECK((iterated_divergence(s, {h}) - FockOp(field_sparse(s, h.k1, h.k2))).norm() < 1e-12);
    for (int n = 1; n <= 3; ++n) {
        std::vector<DirectionPair> dirs;
        for (int j = 0; j < n; ++j) dirs.push_back(j % 2 == 0 ? fx.real_pair(0.6) : fx.complex_pair(0.6));
        const FockOp it = iterated_divergence(s, dirs);
        CHECK((it - wick_subset_sum(s, dirs)).norm() <= 1e-10 * it.norm());
        CHECK((it - wick_product_linear(s, dirs)).norm() <= 1e-10 * it.norm());
    }
    const FockOp c = creation(s, h.k2 - I_unit * h.k1);
    const FockOp a = annihilation(s, conj(h.k2 + I_unit * h.k1));
    const FockOp expected = c * c + 2.0 * c * a + a * a;
    const FockOp it2 = iterated_divergence(s, {h, h});
    CHECK((it2 - expected).norm() <= 1e-12 * it2.norm());
    CHECK_THROWS_AS(iterated_divergence(s, std::vector<DirectionPair>(5, h)), DomainError);
    CHECK_THROWS_AS(wick_subset_sum(s, {}), DomainError);
}
