#include "qmall/check_suite.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "qmall/commutative_bridge.hpp"
#include "qmall/divergence.hpp"
#include "qmall/residual.hpp"
#include "qmall/white_noise.hpp"

namespace qmall {

namespace {

constexpr double kExactReference = 1e-10;
constexpr double kTruncatedReference = 1e-6;

struct Spaces {
    FockSpace core;
    FockSpace single;
    FockSpace quant;
    FockSpace wigner;
    FockSpace noise;
    FockSpace bridge;
};

struct Context {
    const Config& config;
    const Spaces& spaces;
    Rng rng;
    std::uint64_t probe_seed;
    QuadratureSpec quad() const { return config.quadrature; }
};

struct Check {
    const char* id;
    const char* identity;
    const char* measure;
    ToleranceClass cls;
    double base;
    std::function<double(Context&)> run;
};

const DirectionPair& wigner_direction() {
    static const DirectionPair h{HVec::Ones(1), HVec::Ones(1)};
    return h;
}

DirectionPair real_pair(Rng& rng, int modes, double r) { return {rng.real_direction(modes, r), rng.real_direction(modes, r)}; }
DirectionPair complex_pair(Rng& rng, int modes, double r) {
    return {rng.complex_direction(modes, r), rng.complex_direction(modes, r)};
}

cplx bilinear(const HVec& a, const HVec& b) { return (a.transpose() * b)(0); }

double relative(const FockOp& r, const FockOp& scale) {
    const double s = scale.norm();
    return s > 0.0 ? r.norm() / s : r.norm();
}

State thermal(const FockSpace& s, double lambda, double t) {
    const auto sq = second_quantization(s, GaussianSpec{std::vector<double>(static_cast<std::size_t>(s.modes()), lambda), t});
    return State::density(sq.rho / sq.z_truncated);
}

double vacuum_density(double x, double y, double a, double b) {
    return std::exp(-x * x / (2 * a) - y * y / (2 * b)) / (2 * M_PI * std::sqrt(a * b));
}

ElementaryField weyl_field(const FockSpace& s, Rng& rng, int terms) {
    ElementaryField u;
    for (int i = 0; i < terms; ++i) u.add(weyl(s, real_pair(rng, s.modes(), 0.3)), complex_pair(rng, s.modes(), 0.5));
    return u;
}

// ---- Fock space and ladder operators

double exponential_inner(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const HVec k1 = cx.rng.complex_ball(s.modes(), 0.5);
        const HVec k2 = cx.rng.complex_ball(s.modes(), 0.5);
        const cplx got = fock_inner(exponential_vector(s, k1), exponential_vector(s, k2));
        worst = std::max(worst, std::abs(got - std::exp(inner_h(k1, k2))));
    }
    return worst;
}

template <class F>
double ccr_line(Context& cx, F residual) {
    const FockSpace& s = cx.spaces.core;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const bool cpx = t % 2 == 1;
        const HVec h = cpx ? cx.rng.complex_direction(s.modes(), 1.0) : cx.rng.real_direction(s.modes(), 1.0);
        const HVec k = cpx ? cx.rng.complex_direction(s.modes(), 0.8) : cx.rng.real_direction(s.modes(), 0.8);
        worst = std::max(worst, interior_residual(s, residual(s, h, k), s.cutoff() - 2));
    }
    return worst;
}

double weyl_unitarity(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        const FockOp u = weyl(s, real_pair(cx.rng, s.modes(), 0.7));
        worst = std::max(worst, (u.adjoint() * u - FockOp::Identity(s.dim(), s.dim())).norm());
    }
    return worst;
}

double weyl_vacuum_action(Context& cx) {
    const FockSpace& s = cx.spaces.single;
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        const HVec h1 = cx.rng.real_ball(1, 0.35);
        const HVec h2 = cx.rng.real_ball(1, 0.35);
        const auto act = weyl_on_exponential(h1, h2, HVec::Zero(1));
        const FockVec expected = act.scalar * exponential_vector(s, act.argument);
        worst = std::max(worst, (weyl(s, h1, h2) * vacuum(s) - expected).norm() / expected.norm());
    }
    return worst;
}

double weyl_exponential_action(Context& cx) {
    const FockSpace& s = cx.spaces.single;
    const FockOp p = interior_projector(s, s.cutoff() - 2);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        const HVec h1 = cx.rng.real_ball(1, 0.35);
        const HVec h2 = cx.rng.real_ball(1, 0.35);
        const HVec f = cx.rng.complex_ball(1, 0.5);
        const auto act = weyl_on_exponential(h1, h2, f);
        const FockVec expected = act.scalar * exponential_vector(s, act.argument);
        const FockVec got = weyl(s, h1, h2) * exponential_vector(s, f);
        worst = std::max(worst, (p * (got - expected)).norm() / (p * expected).norm());
    }
    return worst;
}

double weyl_composition(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const ProbeSet probes = make_probes(s, 12, cx.probe_seed);
    double worst = 0.0;
    for (int t = 0; t < 4; ++t) {
        const DirectionPair h{cx.rng.real_ball(s.modes(), 0.3), cx.rng.real_ball(s.modes(), 0.3)};
        const DirectionPair k{cx.rng.real_ball(s.modes(), 0.3), cx.rng.real_ball(s.modes(), 0.3)};
        const FockOp rhs = weyl_composition_phase(h, k) * weyl(s, HVec(h.k1 + k.k1), HVec(h.k2 + k.k2));
        worst = std::max(worst, probe_residual(weyl(s, h) * weyl(s, k) - rhs, probes));
    }
    return worst;
}

double weyl_adjoint(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const DirectionPair h = real_pair(cx.rng, s.modes(), 0.6);
    return (weyl(s, h).adjoint() - weyl(s, h.scaled(-1.0))).norm();
}

// ---- Weyl quantization

double quant_plane_wave(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const DirectionPair h = real_pair(cx.rng, 1, 0.5);
    const double x0 = cx.rng.uniform(-1.0, 1.0);
    const double y0 = cx.rng.uniform(-1.0, 1.0);
    return (quantize(s, h, Symbol::plane_wave(x0, y0), cx.quad()) - weyl(s, HVec(x0 * h.k1), HVec(y0 * h.k2))).norm();
}

Symbol random_packet(Rng& rng) {
    return Symbol::gaussian_packet(rng.uniform(0.3, 0.5), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                   rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
}

double quant_adjoint(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const DirectionPair h = real_pair(cx.rng, 1, 0.5);
    const Symbol phi = random_packet(cx.rng);
    const FockOp o = quantize(s, h, phi, cx.quad());
    return relative(o.adjoint() - quantize(s, h, phi.conjugate(), cx.quad()), o);
}

double quant_girsanov(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const ProbeSet probes = make_probes(s, 12, cx.probe_seed);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        const DirectionPair h = real_pair(cx.rng, 1, 0.5);
        const DirectionPair k = real_pair(cx.rng, 1, 0.5);
        const Symbol phi = random_packet(cx.rng);
        const FockOp lhs = conjugate_by_weyl(s, k, quantize(s, h, phi, cx.quad()));
        const Symbol shifted = phi.translate(inner_h(k.k1, h.k1).real(), inner_h(k.k2, h.k2).real());
        worst = std::max(worst, probe_residual(lhs - quantize(s, h, shifted, cx.quad()), probes));
    }
    return worst;
}

double quant_integration_by_parts(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const ProbeSet probes = make_probes(s, 12, cx.probe_seed);
    const DirectionPair h = real_pair(cx.rng, 1, 0.5);
    const DirectionPair k = complex_pair(cx.rng, 1, 0.6);
    const Symbol phi = random_packet(cx.rng);
    const FockOp o = quantize(s, h, phi, cx.quad());
    const FockOp lhs = 0.5 * I_unit * commutator(position(s, conj(k.k1)) - momentum(s, conj(k.k2)), o);
    const FockOp rhs = quantize(s, h, phi.dx() * inner_h(k.k1, h.k1) + phi.dy() * inner_h(k.k2, h.k2), cx.quad());
    return probe_residual(lhs - rhs, probes);
}

double quant_regularity(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const ProbeSet probes = make_probes(s, 12, cx.probe_seed);
    const DirectionPair h = real_pair(cx.rng, 1, 0.5);
    const HVec e = basis_vector(1, 0);
    const auto gen = regularity_generators(s, h, {e, HVec::Zero(1)}, {HVec::Zero(1), e});
    const Symbol phi = random_packet(cx.rng);
    const FockOp o = quantize(s, h, phi, cx.quad());
    return std::max(probe_residual(commutator(gen.x1, o) - quantize(s, h, phi.dx(), cx.quad()), probes),
                    probe_residual(commutator(gen.x2, o) - quantize(s, h, phi.dy(), cx.quad()), probes));
}

// ---- Wigner densities and Gaussian states

double wigner_vacuum_density(Context& cx) {
    const FockSpace& s = cx.spaces.wigner;
    const DensityGrid w = wigner_density(s, State::vacuum(s), wigner_direction(), cx.config.grid);
    double worst = 0.0;
    for (int i = 0; i < w.n; ++i)
        for (int j = 0; j < w.n; ++j)
            worst = std::max(worst, std::abs(w.values(i, j) - vacuum_density(w.coord(i), w.coord(j), 1.0, 1.0)));
    return worst;
}

double wigner_normalization(Context& cx) {
    const FockSpace& s = cx.spaces.wigner;
    return std::abs(normalization(wigner_density(s, State::vacuum(s), wigner_direction(), cx.config.grid)) - 1.0);
}

double wigner_pairing(Context& cx) {
    const FockSpace& s = cx.spaces.wigner;
    const State vac = State::vacuum(s);
    const Symbol phi = random_packet(cx.rng);
    const DensityGrid w = wigner_density(s, vac, wigner_direction(), cx.config.grid);
    return std::abs(grid_pairing(w, phi) - pair_expectation(s, vac, wigner_direction(), phi, cx.quad()));
}

double wigner_round_trip(Context& cx) {
    const FockSpace& s = cx.spaces.wigner;
    const State st = State::normalized(exponential_vector(s, cx.rng.complex_ball(1, 0.5)));
    const DensityGrid chi = characteristic_function(s, st, wigner_direction(), cx.config.grid);
    const DensityGrid back = characteristic_from_wigner(wigner_from_characteristic(chi, INFINITY));
    return (back.values - chi.values).cwiseAbs().maxCoeff();
}

double wigner_thermal_positivity(Context& cx) {
    const FockSpace& s = cx.spaces.wigner;
    const DensityGrid w = wigner_density(s, thermal(s, 1.0, 1.0), wigner_direction(), cx.config.grid);
    return std::max(0.0, -min_value(w)) / max_value(w);
}

double wigner_thermal_variance(Context& cx) {
    const FockSpace& s = cx.spaces.wigner;
    const Moments m = moments(wigner_density(s, thermal(s, 1.0, 1.0), wigner_direction(), cx.config.grid));
    const double coth = 1.0 / std::tanh(0.5);
    return std::max(std::abs(m.var_x - coth), std::abs(m.var_y - coth));
}

double wigner_trace_forms(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const State th = thermal(s, 1.0, 1.0);
    const DirectionPair h = real_pair(cx.rng, 1, 0.5);
    const Symbol phi = random_packet(cx.rng);
    const FockOp o = quantize(s, h, phi, cx.quad());
    const Eigen::SelfAdjointEigenSolver<FockOp> es(th.rho());
    cplx eig = 0.0;
    for (Index i = 0; i < s.dim(); ++i) {
        const FockVec v = es.eigenvectors().col(i);
        eig += es.eigenvalues()(i) * v.dot(o * v);
    }
    return std::abs(pair_expectation(s, th, h, phi, cx.quad()) - eig);
}

// One mode: the omitted levels n > N sum to e^{−t(N+1)}/(1 − e^{−t}) exactly.
double gaussian_partition(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const auto sq = second_quantization(s, GaussianSpec{{1.0}, 1.0});
    const double tail = std::exp(-(s.cutoff() + 1.0)) / (1.0 - std::exp(-1.0));
    return std::abs(sq.z_truncated + tail - sq.z_exact) / sq.z_exact;
}

double gaussian_characteristic(Context& cx) {
    const FockSpace& s = cx.spaces.quant;
    const GaussianSpec spec{{1.0}, 1.0};
    const auto sq = second_quantization(s, spec);
    const HVec e = basis_vector(1, 0);
    double worst = 0.0;
    for (double u : {-1.0, 0.0, 1.0})
        for (double v : {-1.0, 0.0, 1.0}) {
            const cplx chi = (sq.rho * weyl(s, HVec(u * e), HVec(v * e))).trace() / sq.z_truncated;
            worst = std::max(worst, std::abs(chi - thermal_characteristic(spec, e, e, u, v)));
        }
    return worst;
}

// ---- Malliavin derivative

SmoothElement weyl_sum(Rng& rng, int modes) {
    return SmoothElement::weyl(real_pair(rng, modes, 0.3)) * SmoothElement::weyl(real_pair(rng, modes, 0.3)) +
           SmoothElement::weyl(real_pair(rng, modes, 0.4)) * cplx(0.0, 2.0);
}

double malliavin_frechet(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const ProbeSet probes = make_probes(s, 20, cx.probe_seed);
    const SmoothElement w = weyl_sum(cx.rng, s.modes());
    double worst = 0.0;
    for (int t = 0; t < 4; ++t) {
        const DirectionPair k = t % 2 == 0 ? real_pair(cx.rng, s.modes(), 0.5) : complex_pair(cx.rng, s.modes(), 0.5);
        worst = std::max(worst, probe_residual(frechet_difference(s, k, w), probes));
    }
    return worst;
}

double malliavin_conjugation(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const DirectionPair k = complex_pair(cx.rng, s.modes(), 0.6);
    const FockOp b = cx.rng.random_matrix(s.dim());
    const FockOp d = derive_direction(s, k, b);
    return relative(derive_direction(s, k.conj(), b.adjoint()) - d.adjoint(), d);
}

double malliavin_gradient(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const ProbeSet probes = make_probes(s, 20, cx.probe_seed);
    const DirectionPair k = complex_pair(cx.rng, s.modes(), 0.5);
    const ModuleElement u = ModuleElement::direction(s, k);
    const SmoothElement o1 = SmoothElement::weyl(real_pair(cx.rng, s.modes(), 0.3)) + SmoothElement::identity() * 0.5;
    const SmoothElement o2 = weyl_sum(cx.rng, s.modes());
    const FockOp dk = derive_direction(s, k, evaluate(s, o1));
    return std::max({probe_residual(right_gradient(s, u, o1) - dk, probes),
                     probe_residual(left_gradient(s, o1, u) - dk, probes),
                     probe_residual(two_sided_gradient(s, o1, u, o2) -
                                        derive_direction(s, k, evaluate(s, o1) * evaluate(s, o2)),
                                    probes)});
}

double malliavin_integration_by_parts(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const State vac = State::vacuum(s);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        const DirectionPair k = complex_pair(cx.rng, s.modes(), 0.6);
        worst = std::max(worst, integration_by_parts(s, vac, k, weyl_sum(cx.rng, s.modes())).residual());
    }
    return worst;
}

double malliavin_product_rule(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const State vac = State::vacuum(s);
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        const DirectionPair k = complex_pair(cx.rng, s.modes(), 0.6);
        std::vector<SmoothElement> f;
        for (int j = 0; j < 3; ++j) f.push_back(SmoothElement::weyl(real_pair(cx.rng, s.modes(), 0.3)));
        worst = std::max(worst, product_integration_by_parts(s, vac, k, f).residual());
    }
    return worst;
}

// ---- Divergence

double divergence_wick_form(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    ElementaryField u;
    for (int i = 0; i < 3; ++i) u.add(cx.rng.random_matrix(s.dim()), complex_pair(cx.rng, s.modes(), 0.8));
    const FockOp d = divergence_def(s, u);
    return relative(divergence_wick(s, u) - d, d);
}

double divergence_adjoint(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    ElementaryField u;
    for (int i = 0; i < 3; ++i) u.add(cx.rng.random_matrix(s.dim()), complex_pair(cx.rng, s.modes(), 0.8));
    const FockOp d = divergence_def(s, u);
    return relative(divergence_def(s, u.conj()) - d.adjoint(), d);
}

double divergence_vacuum_mean(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const FockOp d = divergence_def(s, ElementaryField::direction(s, complex_pair(cx.rng, s.modes(), 0.7)));
    return std::abs(vacuum(s).dot(d * vacuum(s)));
}

double divergence_matrix_elements(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const ElementaryField u = weyl_field(s, cx.rng, 3);
    const FockOp d = divergence_def(s, u);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const HVec k1 = cx.rng.complex_ball(s.modes(), 0.5);
        const HVec k2 = cx.rng.complex_ball(s.modes(), 0.5);
        const cplx lhs = exponential_vector(s, k1).dot(d * exponential_vector(s, k2));
        worst = std::max(worst, std::abs(lhs - divergence_matrix_rhs(s, u, k1, k2)));
    }
    return worst;
}

double divergence_commutation(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const ProbeSet probes = make_probes(s, 20, cx.probe_seed);
    const DirectionPair h = complex_pair(cx.rng, s.modes(), 0.5);
    return probe_residual(commutation_residual(s, h, weyl_field(s, cx.rng, 2)), probes);
}

double divergence_product(Context& cx, ProductSide side) {
    const FockSpace& s = cx.spaces.core;
    const ProbeSet probes = make_probes(s, 20, cx.probe_seed);
    const ElementaryField u = weyl_field(s, cx.rng, 2);
    const SmoothElement f = SmoothElement::weyl(real_pair(cx.rng, s.modes(), 0.4)) +
                            SmoothElement::weyl(real_pair(cx.rng, s.modes(), 0.3)) * 0.5;
    const ProductFormula p = product_formula(s, f, u, side, cx.quad());
    return probe_residual(p.direct - p.formula, probes);
}

double divergence_duality(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const DirectionPair h = real_pair(cx.rng, s.modes(), 0.5);
    ElementaryField u;
    u.add(weyl(s, real_pair(cx.rng, s.modes(), 0.3)), h);
    u.add(weyl(s, real_pair(cx.rng, s.modes(), 0.3)) * cplx(0.5, 0.2), h.scaled(0.4));
    return duality(s, State::vacuum(s), SmoothElement::weyl(h.scaled(0.6)), u, SmoothElement::weyl(h.scaled(-0.9)),
                   cx.quad())
        .residual();
}

double divergence_nogo(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    const HVec z = HVec::Zero(s.modes());
    const NoGo a = nogo_counterexample(s, {basis_vector(s.modes(), 0), z});
    const NoGo b = nogo_counterexample(s, complex_pair(cx.rng, s.modes(), 0.6));
    return std::max(std::abs(a.value - a.expected), std::abs(b.value - b.expected));
}

double divergence_iterated(Context& cx) {
    const FockSpace& s = cx.spaces.core;
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        std::vector<DirectionPair> dirs;
        for (int j = 0; j < n; ++j)
            dirs.push_back(j % 2 == 0 ? real_pair(cx.rng, s.modes(), 0.6) : complex_pair(cx.rng, s.modes(), 0.6));
        const FockOp it = iterated_divergence(s, dirs);
        worst = std::max(worst, relative(it - wick_subset_sum(s, dirs), it));
    }
    return worst;
}

// ---- White noise

double matrix_element_gap(const FockSpace& s, const FockOp& r, Rng& rng) {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const FockVec e1 = exponential_vector(s, rng.complex_ball(s.modes(), 0.5));
        const FockVec e2 = exponential_vector(s, rng.complex_ball(s.modes(), 0.5));
        worst = std::max(worst, std::abs(e1.dot(r * e2)));
    }
    return worst;
}

template <class F>
double over_adapted_corpus(Context& cx, F per_process) {
    const FockSpace& s = cx.spaces.noise;
    double worst = 0.0;
    for (const auto& [name, spec] : sample_process_corpus()) {
        const ProcessFile f = parse_process(spec);
        if (!f.declared_adapted.value_or(false)) continue;
        worst = std::max(worst, per_process(s, f.grid, build_process(s, f)));
    }
    return worst;
}

double white_noise_skorohod_hp(Context& cx) {
    return over_adapted_corpus(cx, [](const FockSpace& s, const TimeGrid& g, const StepProcessPair& p) {
        return (divergence_def(s, process_to_field(s, g, p)) - hp_integral(s, g, p).value).norm();
    });
}

double white_noise_belavkin(Context& cx) {
    return over_adapted_corpus(cx, [&](const FockSpace& s, const TimeGrid& g, const StepProcessPair& p) {
        const FockOp bel = belavkin_operator(s, g, belavkin_decomposition(s, p));
        return matrix_element_gap(s, bel - divergence_def(s, process_to_field(s, g, p)), cx.rng);
    });
}

double white_noise_nonadapted(Context& cx) {
    const FockSpace s(3, 4, Truncation::per_mode, cx.config.dimension_limit);
    const TimeGrid g{1.0, 3};
    const ProbeSet probes = make_probes(s, 20, cx.probe_seed);
    const DirectionPair own{HVec::Zero(3), HVec(cx.rng.uniform(0.3, 0.6) * basis_vector(3, 1))};
    StepProcessPair p = zero_process(s, g);
    p.x1[1] = weyl(s, own);
    const FockOp diff = divergence_def(s, process_to_field(s, g, p)) - riemann_sum(s, g, p);
    const ElementaryField u = ElementaryField::direction(s, {g.bin_mode(1), HVec::Zero(3)});
    const ProductFormula pf = product_formula(s, SmoothElement::weyl(own), u, ProductSide::left, cx.quad());
    return probe_residual(diff - (pf.formula - weyl(s, own) * divergence_def(s, u)), probes);
}

double white_noise_refinement(Context& cx) {
    const TimeGrid coarse{1.0, 2};
    const TimeGrid fine = coarse.refined();
    const FockSpace sc(2, 4, Truncation::total, cx.config.dimension_limit);
    const FockSpace sf(4, 4, Truncation::total, cx.config.dimension_limit);
    const HVec hc = cx.rng.real_ball(2, 0.5);
    StepProcessPair pc = zero_process(sc, coarse);
    pc.x2[0] = FockOp::Identity(sc.dim(), sc.dim());
    pc.x1[1] = weyl(sc, HVec::Zero(2), hc);
    StepProcessPair pf = zero_process(sf, fine);
    pf.x2[0] = pf.x2[1] = FockOp::Identity(sf.dim(), sf.dim());
    pf.x1[2] = pf.x1[3] = weyl(sf, HVec::Zero(4), coarse.refine_vector(hc));
    const FockOp dc = divergence_def(sc, process_to_field(sc, coarse, pc));
    const FockOp df = divergence_def(sf, process_to_field(sf, fine, pf));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const HVec k1 = cx.rng.complex_ball(2, 0.5);
        const HVec k2 = cx.rng.complex_ball(2, 0.5);
        const cplx c = exponential_vector(sc, k1).dot(dc * exponential_vector(sc, k2));
        const cplx f = exponential_vector(sf, coarse.refine_vector(k1)).dot(df * exponential_vector(sf, coarse.refine_vector(k2)));
        worst = std::max(worst, std::abs(c - f));
    }
    return worst;
}

// ---- Commutative bridge

double bridge_derivative(Context& cx) {
    const FockSpace& s = cx.spaces.bridge;
    const ProbeSet probes = make_probes(s, 20, cx.probe_seed);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const HVec k = cx.rng.real_ball(2, 1.0);
        const HVec h = cx.rng.real_ball(2, 0.8);
        worst = std::max(worst, probe_residual(classical_derivative_check(s, k, h), probes));
    }
    return worst;
}

double bridge_commutativity(Context& cx) {
    const FockSpace s(2, cx.config.cutoff, Truncation::per_mode, cx.config.dimension_limit);
    std::vector<ClassicalExponential> family;
    for (int t = 0; t < 6; ++t) family.push_back({cx.rng.real_ball(2, 1.0)});
    return commutativity_residual(s, family);
}

const std::vector<Check>& registry() {
    using TC = ToleranceClass;
    static const std::vector<Check> checks = {
        {"fock.exponential_inner", "<E(k1), E(k2)> = exp<k1, k2>", "max abs error, 10 pairs |k| <= 0.5", TC::exact, 1e-10,
         exponential_inner},
        {"ccr.annihilation_creation", "[a(h), a+(k)] = <h, k>", "interior Frobenius, degree <= N-2, 20 pairs", TC::exact,
         1e-10,
         [](Context& cx) {
             return ccr_line(cx, [](const FockSpace& s, const HVec& h, const HVec& k) {
                 return FockOp(commutator(annihilation(s, h), creation(s, k)) -
                               inner_h(h, k) * FockOp::Identity(s.dim(), s.dim()));
             });
         }},
        {"ccr.position", "[Q(h), Q(k)] = 0", "interior Frobenius, degree <= N-2, 20 pairs", TC::exact, 1e-10,
         [](Context& cx) {
             return ccr_line(cx, [](const FockSpace& s, const HVec& h, const HVec& k) {
                 return commutator(position(s, h), position(s, k));
             });
         }},
        {"ccr.momentum", "[P(h), P(k)] = 0", "interior Frobenius, degree <= N-2, 20 pairs", TC::exact, 1e-10,
         [](Context& cx) {
             return ccr_line(cx, [](const FockSpace& s, const HVec& h, const HVec& k) {
                 return commutator(momentum(s, h), momentum(s, k));
             });
         }},
        {"ccr.momentum_position", "[P(h), Q(k)] = 2i sum h_j k_j", "interior Frobenius, degree <= N-2, 20 pairs",
         TC::exact, 1e-10,
         [](Context& cx) {
             return ccr_line(cx, [](const FockSpace& s, const HVec& h, const HVec& k) {
                 return FockOp(commutator(momentum(s, h), position(s, k)) -
                               2.0 * I_unit * bilinear(h, k) * FockOp::Identity(s.dim(), s.dim()));
             });
         }},
        {"weyl.unitarity", "U(h)* U(h) = I", "Frobenius, 5 real pairs", TC::exact, 1e-12, weyl_unitarity},
        {"weyl.adjoint", "U(h)* = U(-h)", "Frobenius", TC::exact, 1e-12, weyl_adjoint},
        {"weyl.vacuum_action", "U(h1, h2) Omega = exp(-|h|^2/2) E(h1 + i h2)", "relative vector error, single mode",
         TC::truncated, 1e-6, weyl_vacuum_action},
        {"weyl.exponential_action", "U(h1, h2) E(f) = exp(-<conj f, h1 - i h2> - |h|^2/2) E(f + h1 + i h2)",
         "relative vector error on degree <= N-2, single mode", TC::truncated, 1e-6, weyl_exponential_action},
        {"weyl.composition", "U(h) U(k) = exp(i(<h2, k1> - <h1, k2>)) U(h + k)", "probe matrix elements",
         TC::truncated, 1e-8, weyl_composition},
        {"quant.plane_wave", "O_h(exp(i(x0 x + y0 y))) = U(x0 h1, y0 h2)", "Frobenius", TC::exact, 1e-12,
         quant_plane_wave},
        {"quant.adjoint", "O_h(phi)* = O_h(conj phi)", "relative Frobenius", TC::exact, 1e-10, quant_adjoint},
        {"quant.girsanov", "U O_h(phi) U* = O_h(phi translated by (<k1, h1>, <k2, h2>))",
         "probe matrix elements, 3 pairs", TC::truncated, 1e-6, quant_girsanov},
        {"quant.integration_by_parts",
         "(i/2)[Q(conj k1) - P(conj k2), O_h(phi)] = O_h(<k1, h1> dphi/dx + <k2, h2> dphi/dy)",
         "probe matrix elements, complex k", TC::truncated, 1e-6, quant_integration_by_parts},
        {"quant.regularity", "[X1, O_h(phi)] = O_h(dphi/dx), [X2, O_h(phi)] = O_h(dphi/dy)", "probe matrix elements",
         TC::truncated, 1e-6, quant_regularity},
        {"wigner.vacuum_density", "w(x, y) = exp(-x^2/2a - y^2/2b) / (2 pi sqrt(ab))", "max abs error on the grid",
         TC::truncated, 1e-4, wigner_vacuum_density},
        {"wigner.normalization", "integral of w = 1", "abs error of the grid sum", TC::truncated, 1e-6,
         wigner_normalization},
        {"wigner.pairing", "Phi(O_h(phi)) = integral of phi w", "abs error", TC::truncated, 1e-4, wigner_pairing},
        {"wigner.round_trip", "characteristic -> density -> characteristic is the identity", "max abs error",
         TC::exact, 1e-10, wigner_round_trip},
        {"wigner.thermal_positivity", "thermal density is nonnegative", "max(0, -min w) / max w", TC::exact, 1e-12,
         wigner_thermal_positivity},
        {"wigner.thermal_variance", "thermal variance = coth(t lambda / 2) |h|^2", "abs error of grid moments",
         TC::truncated, 1e-6, wigner_thermal_variance},
        {"wigner.trace_forms", "tr(rho O_h(phi)) by quadrature = by eigenbasis", "abs error", TC::exact, 1e-10,
         wigner_trace_forms},
        {"gaussian.partition", "Z_t = prod 1 / (1 - exp(-t lambda))", "relative error of truncated sum plus tail",
         TC::exact, 1e-12, gaussian_partition},
        {"gaussian.characteristic", "tr(rho_t U(uh1, vh2)) / Z_t = exp(-|u h1 + i v h2|^2 coth(t lambda / 2) / 2)",
         "max abs error, 9 grid points", TC::truncated, 1e-6, gaussian_characteristic},
        {"malliavin.frechet", "D_k O = <id (x) conj k, DO>", "probe matrix elements, Weyl-only", TC::truncated, 1e-10,
         malliavin_frechet},
        {"malliavin.conjugation", "D_{conj k}(B*) = (D_k B)*", "relative Frobenius", TC::exact, 1e-12,
         malliavin_conjugation},
        {"malliavin.gradient", "<conj u, DO> = <conj DO, u> = D_k O for u = id (x) k", "probe matrix elements",
         TC::truncated, 1e-10, malliavin_gradient},
        {"malliavin.integration_by_parts", "E<conj k, DO> = (1/2) E{P(k1) + Q(k2), O}", "abs error, vacuum",
         TC::truncated, 1e-8, malliavin_integration_by_parts},
        {"malliavin.product_rule", "(1/2) E{P(k1) + Q(k2), O1 O2 O3} = sum_m E(O1 .. <conj k, DO_m> .. O3)",
         "abs error, vacuum", TC::truncated, 1e-8, malliavin_product_rule},
        {"divergence.wick_form", "(1/2) sum {S_j, F_j} - sum D F_j = sum a+(h2 - i h1) F + F a(conj(h2 + i h1))",
         "Frobenius relative to |delta(u)|", TC::exact, 1e-12, divergence_wick_form},
        {"divergence.adjoint", "delta(conj u) = delta(u)*", "Frobenius relative to |delta(u)|", TC::exact, 1e-12,
         divergence_adjoint},
        {"divergence.vacuum_mean", "<Omega, delta(id (x) h) Omega> = 0", "abs value", TC::exact, 1e-12,
         divergence_vacuum_mean},
        {"divergence.matrix_elements",
         "<E(k1), delta(u) E(k2)> = sum (<k1, h2 - i h1> + <conj k2, h2 + i h1>) <E(k1), F E(k2)>",
         "max abs error, 20 pairs |k| <= 0.5", TC::truncated, 1e-8, divergence_matrix_elements},
        {"divergence.commutation", "D_h delta(u) = delta(D_h u) + <id (x) conj h, u>", "probe matrix elements",
         TC::truncated, 1e-8, divergence_commutation},
        {"divergence.product_left", "delta(Fu) = F delta(u) - F<-D_u + (1/2) sum [S_j, F] F_j", "probe matrix elements",
         TC::truncated, 1e-8, [](Context& cx) { return divergence_product(cx, ProductSide::left); }},
        {"divergence.product_right", "delta(uF) = delta(u) F - D_u->F + (1/2) sum F_j [F, S_j]",
         "probe matrix elements", TC::truncated, 1e-8,
         [](Context& cx) { return divergence_product(cx, ProductSide::right); }},
        {"divergence.duality", "E(A delta(u) B) = E(A<->D_u B) for A, B in the commutant", "abs error, vacuum",
         TC::truncated, 1e-8, divergence_duality},
        {"divergence.nogo", "E(D_k B) = -(i/2)<k1 + i k2, k1 + i k2> for B = |Omega><conj(k1 + i k2)|",
         "abs error, two directions", TC::exact, 1e-10, divergence_nogo},
        {"divergence.iterated", "delta^n(h^1 .. h^n) = Wick subset sum", "Frobenius relative, n = 1, 2, 3", TC::exact,
         1e-10, divergence_iterated},
        {"white_noise.skorohod_hp", "delta(u) = Hudson-Parthasarathy integral for adapted u",
         "Frobenius, 5 adapted processes, 4 bins", TC::exact, 1e-9, white_noise_skorohod_hp},
        {"white_noise.belavkin", "delta(u) = sum a+(e_j) G+_j + G_j a(e_j)", "exponential matrix elements",
         TC::truncated, 1e-8, white_noise_belavkin},
        {"white_noise.nonadapted", "delta(u) - Riemann sum = product-formula correction on a non-adapted integrand",
         "probe matrix elements", TC::truncated, 1e-8, white_noise_nonadapted},
        {"white_noise.refinement", "delta(u) unchanged when each bin is split in two",
         "exponential matrix elements, 10 pairs", TC::exact, 1e-12, white_noise_refinement},
        {"bridge.derivative", "D_(0,k) U(0, h) = i<k, h> U(0, h)", "probe matrix elements, 10 pairs", TC::truncated,
         1e-9, bridge_derivative},
        {"bridge.commutativity", "[U(0, h), U(0, h')] = 0", "max Frobenius, 6 directions", TC::exact, 1e-12,
         bridge_commutativity},
    };
    return checks;
}

void reject_unknown(const nlohmann::json& j) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& k : config_keys()) known = known || key == k;
        if (!known) throw ConfigError("unknown config key '" + key + "'");
    }
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace

void Config::validate() const {
    if (modes < 1) throw ConfigError("modes must be positive");
    if (cutoff < 2) throw ConfigError("cutoff must be at least 2");
    if (!(tolerance >= 0.0) || !(weyl_tolerance >= 0.0)) throw ConfigError("tolerances must be nonnegative");
    if (dimension_limit < 1) throw ConfigError("dimension_limit must be positive");
    try {
        quadrature.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    grid.validate();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"modes",          "cutoff",          "tolerance",
                                                  "weyl_tolerance", "quadrature_half_width",
                                                  "quadrature_nodes", "grid_half_width", "grid_nodes",
                                                  "seed",           "dimension_limit"};
    return keys;
}

Config config_from_json(const nlohmann::json& j, Config base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j);
    read_key(j, "modes", base.modes);
    read_key(j, "cutoff", base.cutoff);
    read_key(j, "tolerance", base.tolerance);
    read_key(j, "weyl_tolerance", base.weyl_tolerance);
    read_key(j, "quadrature_half_width", base.quadrature.half_width);
    read_key(j, "quadrature_nodes", base.quadrature.nodes);
    read_key(j, "grid_half_width", base.grid.half_width);
    read_key(j, "grid_nodes", base.grid.nodes);
    read_key(j, "seed", base.seed);
    read_key(j, "dimension_limit", base.dimension_limit);
    base.validate();
    return base;
}

nlohmann::ordered_json config_to_json(const Config& c) {
    nlohmann::ordered_json j;
    j["modes"] = c.modes;
    j["cutoff"] = c.cutoff;
    j["tolerance"] = c.tolerance;
    j["weyl_tolerance"] = c.weyl_tolerance;
    j["quadrature_half_width"] = c.quadrature.half_width;
    j["quadrature_nodes"] = c.quadrature.nodes;
    j["grid_half_width"] = c.grid.half_width;
    j["grid_nodes"] = c.grid.nodes;
    j["seed"] = c.seed;
    j["dimension_limit"] = c.dimension_limit;
    return j;
}

int ResidualReport::passed() const {
    int n = 0;
    for (const auto& c : checks) n += c.pass ? 1 : 0;
    return n;
}

nlohmann::ordered_json ResidualReport::to_json(bool timings) const {
    nlohmann::ordered_json out;
    out["config"] = config_to_json(config);
    out["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["check_id"] = c.check_id;
        e["paper_ref"] = c.paper_ref;
        e["measure"] = c.measure;
        e["residual"] = std::isfinite(c.residual) ? nlohmann::ordered_json(c.residual) : nlohmann::ordered_json(nullptr);
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        if (!c.error.empty()) e["error"] = c.error;
        if (timings) e["runtime_ms"] = static_cast<std::int64_t>(std::llround(c.runtime_ms));
        out["checks"].push_back(std::move(e));
    }
    out["summary"] = {{"total", checks.size()}, {"passed", passed()}, {"failed", failed()}};
    return out;
}

int wigner_cutoff(const DirectionPair& h, const GridSpec& grid) {
    const double l = resolve_grid(h, grid).half_width;
    return static_cast<int>(std::ceil(0.625 * l * l * (h.k1.squaredNorm() + h.k2.squaredNorm()) - 1e-9));
}

SuiteSpaces suite_spaces(const Config& c) {
    return {c.modes, c.cutoff, c.cutoff, c.cutoff + 4, wigner_cutoff(wigner_direction(), c.grid), 2 * c.cutoff};
}

void check_dimensions(const Config& c) {
    const SuiteSpaces s = suite_spaces(c);
    const struct {
        const char* name;
        int modes;
        int cutoff;
        Truncation truncation;
    } spaces[] = {{"core", s.core_modes, s.core_cutoff, Truncation::total},
                  {"single-mode", 1, s.single_cutoff, Truncation::total},
                  {"quantization", 1, s.quant_cutoff, Truncation::total},
                  {"wigner", 1, s.wigner_cutoff, Truncation::total},
                  {"white-noise", 4, 5, Truncation::per_mode},
                  {"bridge", 2, s.bridge_cutoff, Truncation::per_mode}};
    for (const auto& sp : spaces) {
        const std::size_t d = predicted_dimension(sp.modes, sp.cutoff, sp.truncation);
        if (d > c.dimension_limit) {
            std::ostringstream msg;
            msg << sp.name << " space (" << sp.modes << " modes, cutoff " << sp.cutoff << ") has dimension " << d
                << ", above the limit " << c.dimension_limit;
            throw DimensionLimitError(msg.str());
        }
    }
}

double scaled_tolerance(const Config& c, ToleranceClass cls, double base) {
    return cls == ToleranceClass::exact ? base * (c.tolerance / kExactReference)
                                        : base * (c.weyl_tolerance / kTruncatedReference);
}

std::vector<std::string> check_ids() {
    std::vector<std::string> out;
    for (const auto& c : registry()) out.emplace_back(c.id);
    return out;
}

ResidualReport run_checks(const Config& c, const std::string& filter) {
    std::vector<std::string> prefixes;
    std::stringstream fs(filter);
    for (std::string p; std::getline(fs, p, ',');)
        if (!p.empty()) prefixes.push_back(p);
    auto selected = [&](const std::string& id) {
        if (prefixes.empty()) return true;
        for (const auto& p : prefixes)
            if (id.rfind(p, 0) == 0) return true;
        return false;
    };
    c.validate();
    check_dimensions(c);
    const SuiteSpaces ss = suite_spaces(c);
    const Spaces spaces{FockSpace(ss.core_modes, ss.core_cutoff, Truncation::total, c.dimension_limit),
                        FockSpace(1, ss.single_cutoff, Truncation::total, c.dimension_limit),
                        FockSpace(1, ss.quant_cutoff, Truncation::total, c.dimension_limit),
                        FockSpace(1, ss.wigner_cutoff, Truncation::total, c.dimension_limit),
                        FockSpace(4, 5, Truncation::per_mode, c.dimension_limit),
                        FockSpace(2, ss.bridge_cutoff, Truncation::per_mode, c.dimension_limit)};
    ResidualReport report;
    report.config = c;
    const auto& checks = registry();
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const Check& chk = checks[i];
        if (!selected(chk.id)) continue;
        const std::uint64_t seed = c.seed * 1000003ULL + 7919ULL * (i + 1);
        Context cx{c, spaces, Rng(seed), seed + 1};
        CheckResult r;
        r.check_id = chk.id;
        r.paper_ref = chk.identity;
        r.measure = chk.measure;
        r.tolerance = scaled_tolerance(c, chk.cls, chk.base);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            r.residual = chk.run(cx);
        } catch (const DimensionLimitError&) {
            throw;
        } catch (const Error& e) {
            r.residual = std::numeric_limits<double>::infinity();
            r.error = e.what();
        }
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        r.pass = std::isfinite(r.residual) && r.residual <= r.tolerance;
        report.checks.push_back(std::move(r));
    }
    return report;
}

}  // namespace qmall
