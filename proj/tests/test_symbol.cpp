#include <doctest.h>

#include <cmath>

#include "qmall/symbol.hpp"

using namespace qmall;

namespace {

Symbol sample_poly() {
    PolyGaussian g;
    g.coeffs[{0, 0}] = cplx(0.5, 0.1);
    g.coeffs[{1, 0}] = cplx(-0.3, 0.2);
    g.coeffs[{1, 2}] = cplx(0.25, 0.0);
    g.alpha = 0.7;
    g.cx = 0.3;
    g.cy = -0.4;
    g.px = 0.8;
    g.py = -0.5;
    return Symbol::poly_gaussian(g);
}

// (1/2π)∫φ(x,y)e^{−i(ux+vy)} by a fine trapezoid rule on [−R,R]²
cplx numeric_inverse_fourier(const Symbol& phi, double u, double v) {
    const int n = 801;
    const double R = 9.0;
    const double h = 2 * R / (n - 1);
    cplx s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -R + i * h;
        for (int j = 0; j < n; ++j) {
            const double y = -R + j * h;
            s += phi.value(x, y) * std::exp(cplx(0.0, -(u * x + v * y)));
        }
    }
    return s * h * h / (2.0 * M_PI);
}

}  // namespace

TEST_CASE("plane wave and Gaussian packet values") {
    const Symbol pw = Symbol::plane_wave(0.7, -1.1);
    CHECK(std::abs(pw.value(0.3, 0.2) - std::exp(cplx(0, 0.7 * 0.3 - 1.1 * 0.2))) < 1e-15);
    const Symbol g = Symbol::gaussian_packet(2.0, 0.1, 0.2, 0.5, 0.6);
    const double r2 = std::pow(0.4 - 0.1, 2) + std::pow(-0.3 - 0.2, 2);
    CHECK(std::abs(g.value(0.4, -0.3) - std::exp(-2.0 * r2) * std::exp(cplx(0, 0.5 * 0.4 - 0.6 * 0.3))) < 1e-15);
    CHECK_THROWS_AS(Symbol::gaussian_packet(0.0), DomainError);
}

TEST_CASE("derivatives match central differences") {
    const Symbol phi = sample_poly() + Symbol::plane_wave(0.4, 0.9) * cplx(0.2, 0.3) +
                       Symbol::gaussian_packet(1.3, -0.2, 0.1, 0.0, 0.7);
    const double eps = 1e-5;
    for (auto [x, y] : {std::pair{0.1, 0.2}, std::pair{-0.5, 0.7}, std::pair{1.1, -0.3}}) {
        const cplx fx = (phi.value(x + eps, y) - phi.value(x - eps, y)) / (2 * eps);
        const cplx fy = (phi.value(x, y + eps) - phi.value(x, y - eps)) / (2 * eps);
        CHECK(std::abs(phi.dx().value(x, y) - fx) < 1e-8);
        CHECK(std::abs(phi.dy().value(x, y) - fy) < 1e-8);
    }
}

TEST_CASE("translation and conjugation stay in the family") {
    const Symbol phi = sample_poly() + Symbol::plane_wave(-0.6, 0.3);
    const Symbol t = phi.translate(0.35, -0.15);
    const Symbol c = phi.conjugate();
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{0.4, -0.8}, std::pair{-1.2, 0.5}}) {
        CHECK(std::abs(t.value(x, y) - phi.value(x + 0.35, y - 0.15)) < 1e-14);
        CHECK(std::abs(c.value(x, y) - std::conj(phi.value(x, y))) < 1e-14);
    }
}

TEST_CASE("inverse Fourier closed forms against quadrature") {
    const Symbol packet = Symbol::gaussian_packet(0.9, 0.2, -0.1, 0.5, -0.3);
    const Symbol poly = sample_poly();
    for (const Symbol* phi : {&packet, &poly}) {
        for (auto [u, v] : {std::pair{0.0, 0.0}, std::pair{0.7, -0.4}, std::pair{-1.3, 0.9}}) {
            CHECK(std::abs(phi->inverse_fourier(u, v) - numeric_inverse_fourier(*phi, u, v)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(Symbol::plane_wave(1.0, 0.0).inverse_fourier(0.0, 0.0), DomainError);
}

TEST_CASE("inverse Fourier of a translation picks up e^{i(u x0 + v y0)}") {
    const Symbol phi = sample_poly();
    const double x0 = 0.45;
    const double y0 = -0.25;
    for (auto [u, v] : {std::pair{0.3, 0.1}, std::pair{-0.9, 1.4}}) {
        const cplx expected = std::exp(cplx(0, u * x0 + v * y0)) * phi.inverse_fourier(u, v);
        CHECK(std::abs(phi.translate(x0, y0).inverse_fourier(u, v) - expected) < 1e-14);
    }
}

TEST_CASE("linear combinations") {
    const Symbol a = Symbol::gaussian_packet(1.0);
    const Symbol b = Symbol::plane_wave(0.2, 0.3);
    const Symbol s = a * cplx(2.0, 1.0) + b * cplx(0.0, -1.0);
    CHECK(std::abs(s.value(0.3, 0.4) - (cplx(2, 1) * a.value(0.3, 0.4) - I_unit * b.value(0.3, 0.4))) < 1e-15);
    CHECK(Symbol::constant(3.0).value(1.0, 2.0) == cplx(3.0));
}
