#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "qmall/operators.hpp"
#include "qmall/residual.hpp"
#include "qmall/white_noise.hpp"

using namespace qmall;

namespace {

nlohmann::json load(const std::string& name) {
    std::ifstream in(std::string(QMALL_DATA_DIR) + "/processes/" + name);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

const FockSpace& bins4() {
    static const FockSpace s(4, 5, Truncation::per_mode);
    return s;
}

double matrix_element_gap(const FockSpace& s, const FockOp& a, const FockOp& b, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const FockVec e1 = exponential_vector(s, rng.complex_ball(s.modes(), 0.5));
        const FockVec e2 = exponential_vector(s, rng.complex_ball(s.modes(), 0.5));
        worst = std::max(worst, std::abs(e1.dot((a - b) * e2)));
    }
    return worst;
}

}  // namespace

TEST_CASE("time grid embeddings") {
    const TimeGrid g{2.0, 4};
    CHECK(g.delta() == 0.5);
    CHECK(std::abs(g.bin_mode(1).norm() - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(g.indicator(4).squaredNorm() - 2.0) < 1e-14);
    CHECK(std::abs(g.indicator(2).squaredNorm() - 1.0) < 1e-14);
    const HVec fine = g.refine_vector(basis_vector(4, 1));
    CHECK(std::abs(fine(2) - 1 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(fine.norm() - 1.0) < 1e-15);
    CHECK_THROWS_AS(TimeGrid({0.0, 4}).validate(), ConfigError);
}

TEST_CASE("constant integrand gives P of the indicator") {
    const FockSpace& s = bins4();
    const ProcessFile f = parse_process(load("adapted_constant.json"));
    const StepProcessPair p = build_process(s, f);
    CHECK(p.adapted);
    const FockOp expected(ladder_sparse(s, LadderKind::momentum, f.grid.indicator(4)));
    const ElementaryField u = process_to_field(s, f.grid, p);
    CHECK(u.terms().size() == 4);
    CHECK((divergence_def(s, u) - expected).norm() < 1e-12);
    const HPIntegral hp = hp_integral(s, f.grid, p);
    CHECK((hp.value - expected).norm() < 1e-12);
    CHECK(hp.ordering_residual == 0.0);
}

TEST_CASE("adapted corpus: Skorohod equals Hudson-Parthasarathy") {
    const FockSpace& s = bins4();
    for (const char* name : {"adapted_constant.json", "adapted_weyl.json", "adapted_ladder.json", "adapted_mixed.json",
                              "adapted_single_bin.json"}) {
        CAPTURE(name);
        const ProcessFile f = parse_process(load(name));
        const StepProcessPair p = build_process(s, f);
        const AdaptednessWitness w = adaptedness_check(s, f.grid, p);
        CHECK(w.adapted);
        const FockOp d = divergence_def(s, process_to_field(s, f.grid, p));
        const HPIntegral hp = hp_integral(s, f.grid, p);
        CHECK((d - hp.value).norm() <= 1e-9);
        CHECK(hp.ordering_residual <= 1e-10);
        const FockOp bel = belavkin_operator(s, f.grid, belavkin_decomposition(s, p));
        CHECK(matrix_element_gap(s, bel, d, 61) <= 1e-8);
        CHECK((bel - divergence_wick(s, process_to_field(s, f.grid, p))).norm() <= 1e-12 * std::max(1.0, d.norm()));
    }
}

TEST_CASE("non-adapted process is flagged with its witness") {
    const FockSpace& s = bins4();
    const ProcessFile f = parse_process(load("nonadapted_own_bin.json"));
    const StepProcessPair p = build_process(s, f);
    const AdaptednessWitness w = adaptedness_check(s, f.grid, p);
    CHECK_FALSE(w.adapted);
    CHECK(w.bin == 2);
    CHECK(w.mode == 2);
    CHECK(w.residual > 1.0);
    CHECK_THROWS_AS(hp_integral(s, f.grid, p), NotAdaptedError);
}

TEST_CASE("adaptedness examples") {
    const FockSpace s(3, 3, Truncation::per_mode);
    const TimeGrid g{1.0, 3};
    StepProcessPair p = zero_process(s, g);
    p.x1[2] = weyl(s, HVec(0.5 * basis_vector(3, 1)), HVec(0.2 * basis_vector(3, 0)));
    CHECK(adaptedness_check(s, g, p).adapted);
    p.x2[1] = position(s, basis_vector(3, 2));
    const AdaptednessWitness w = adaptedness_check(s, g, p);
    CHECK_FALSE(w.adapted);
    CHECK(w.bin == 1);
    CHECK(w.mode == 2);
}

TEST_CASE("non-adapted difference is the product-formula correction") {
    const FockSpace s(3, 4, Truncation::per_mode);
    const TimeGrid g{1.0, 3};
    const DirectionPair own{HVec::Zero(3), HVec(0.5 * basis_vector(3, 1))};
    StepProcessPair p = zero_process(s, g);
    p.x1[1] = weyl(s, own);
    const FockOp diff = divergence_def(s, process_to_field(s, g, p)) - riemann_sum(s, g, p);
    const ElementaryField u = ElementaryField::direction(s, {g.bin_mode(1), HVec::Zero(3)});
    const ProductFormula pf = product_formula(s, SmoothElement::weyl(own), u, ProductSide::left);
    const FockOp predicted = pf.formula - weyl(s, own) * divergence_def(s, u);
    const ProbeSet probes = make_probes(s, 20, 62);
    CHECK(probe_residual(diff - predicted, probes) < 1e-8);
    CHECK(probe_residual(diff, probes) > 1e-3);
}

TEST_CASE("Belavkin integrands") {
    const FockSpace s(2, 3, Truncation::per_mode);
    const TimeGrid g{1.0, 2};
    StepProcessPair p = zero_process(s, g);
    p.x1[0] = FockOp::Identity(s.dim(), s.dim());
    const BelavkinDecomposition d = belavkin_decomposition(s, p);
    CHECK((d.creation[0] + I_unit * p.x1[0]).norm() == 0.0);
    CHECK((d.annihilation[0] - I_unit * p.x1[0]).norm() == 0.0);
    const FockOp expected(ladder_sparse(s, LadderKind::momentum, g.bin_mode(0)));
    CHECK((belavkin_operator(s, g, d) - expected).norm() < 1e-12);
    StepProcessPair q = zero_process(s, g);
    q.x2[1] = weyl(s, HVec(0.3 * basis_vector(2, 0)), HVec::Zero(2));
    const BelavkinDecomposition e = belavkin_decomposition(s, q);
    CHECK((e.creation[1] - q.x2[1]).norm() == 0.0);
    CHECK((e.annihilation[1] - q.x2[1]).norm() == 0.0);
}

TEST_CASE("refining the bins leaves the divergence unchanged") {
    const TimeGrid coarse{1.0, 2};
    const TimeGrid fine = coarse.refined();
    const FockSpace sc = build_space(2, 4);
    const FockSpace sf = build_space(4, 4);
    const HVec hc = 0.5 * basis_vector(2, 0);
    StepProcessPair pc = zero_process(sc, coarse);
    pc.x2[0] = FockOp::Identity(sc.dim(), sc.dim());
    pc.x1[1] = weyl(sc, HVec::Zero(2), hc);
    StepProcessPair pf = zero_process(sf, fine);
    pf.x2[0] = pf.x2[1] = FockOp::Identity(sf.dim(), sf.dim());
    pf.x1[2] = pf.x1[3] = weyl(sf, HVec::Zero(4), coarse.refine_vector(hc));
    const FockOp dc = divergence_def(sc, process_to_field(sc, coarse, pc));
    const FockOp df = divergence_def(sf, process_to_field(sf, fine, pf));
    Rng rng(63);
    for (int t = 0; t < 10; ++t) {
        const HVec k1 = rng.complex_ball(2, 0.5);
        const HVec k2 = rng.complex_ball(2, 0.5);
        const cplx c = exponential_vector(sc, k1).dot(dc * exponential_vector(sc, k2));
        const cplx f = exponential_vector(sf, coarse.refine_vector(k1)).dot(df * exponential_vector(sf, coarse.refine_vector(k2)));
        CHECK(std::abs(c - f) < 1e-12);
    }
}

TEST_CASE("process parsing errors") {
    const FockSpace s(2, 2, Truncation::per_mode);
    CHECK_THROWS_AS(parse_process(nlohmann::json{{"bins", 2}}), ConfigError);
    CHECK_THROWS_AS(parse_process(nlohmann::json{{"T", 1.0}, {"bins", 2}, {"terms", {{{"bin", 5}}}}}), ConfigError);
    CHECK_THROWS_AS(matrix_from_spec(s, "unit"), ConfigError);
    CHECK_THROWS_AS(matrix_from_spec(s, nlohmann::json{{"h1", {1.0}}}), ConfigError);
    CHECK_THROWS_AS(matrix_from_spec(s, nlohmann::json{{"ladder", "spin"}, {"h", {1.0, 0.0}}}), ConfigError);
    const FockOp m = matrix_from_spec(s, nlohmann::json{{"ladder", "create"}, {"h", {1.0, 0.0}}});
    CHECK((m - FockOp(s.raising(0))).norm() == 0.0);
}

TEST_CASE("process files match the built-in corpus") {
    const auto corpus = sample_process_corpus();
    CHECK(corpus.size() == 6);
    int adapted = 0;
    for (const auto& [name, spec] : corpus) {
        CAPTURE(name);
        CHECK(load(name + ".json") == spec);
        adapted += parse_process(spec).declared_adapted.value_or(false) ? 1 : 0;
    }
    CHECK(adapted == 5);
}
