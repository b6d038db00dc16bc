#include "qmall/symbol.hpp"

#include <cmath>

namespace qmall {

namespace {

// Physicists' Hermite polynomial H_n(z).
double hermite(int n, double z) {
    if (n == 0) return 1.0;
    double h0 = 1.0;
    double h1 = 2.0 * z;
    for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * z * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// ∫ s^a e^{−αs²} e^{iωs} ds = √(π/α) (i/(2√α))^a H_a(ω/(2√α)) e^{−ω²/(4α)}
cplx moment_transform(int a, double alpha, double omega) {
    const double r = std::sqrt(alpha);
    const double z = omega / (2.0 * r);
    cplx factor = std::sqrt(M_PI / alpha) * std::exp(-z * z) * hermite(a, z);
    const cplx step(0.0, 1.0 / (2.0 * r));
    for (int k = 0; k < a; ++k) factor *= step;
    return factor;
}

PolyGaussian derive(const PolyGaussian& g, bool along_x) {
    PolyGaussian out = g;
    out.coeffs.clear();
    const double p = along_x ? g.px : g.py;
    for (const auto& [key, c] : g.coeffs) {
        const int a = along_x ? key.first : key.second;
        auto shifted = [&](int delta) {
            return along_x ? std::make_pair(key.first + delta, key.second) : std::make_pair(key.first, key.second + delta);
        };
        if (a > 0) out.coeffs[shifted(-1)] += static_cast<double>(a) * c;
        out.coeffs[shifted(1)] += -2.0 * g.alpha * c;
        if (p != 0.0) out.coeffs[shifted(0)] += I_unit * p * c;
    }
    return out;
}

}  // namespace

int PolyGaussian::degree() const {
    int d = 0;
    for (const auto& [key, c] : coeffs) {
        if (c != cplx(0.0)) d = std::max(d, key.first + key.second);
    }
    return d;
}

Symbol Symbol::plane_wave(double x0, double y0) {
    Symbol s;
    s.terms_.emplace_back(1.0, PlaneWave{x0, y0});
    return s;
}

Symbol Symbol::gaussian_packet(double alpha, double cx, double cy, double px, double py) {
    PolyGaussian g;
    g.coeffs[{0, 0}] = 1.0;
    g.alpha = alpha;
    g.cx = cx;
    g.cy = cy;
    g.px = px;
    g.py = py;
    return poly_gaussian(std::move(g));
}

Symbol Symbol::poly_gaussian(PolyGaussian g) {
    if (!(g.alpha > 0.0)) throw DomainError("PolyGaussian: alpha must be positive");
    Symbol s;
    s.terms_.emplace_back(1.0, std::move(g));
    return s;
}

Symbol Symbol::constant(cplx c) { return plane_wave(0.0, 0.0) * c; }

cplx term_value(const SymbolTerm& t, double x, double y) {
    if (const auto* pw = std::get_if<PlaneWave>(&t)) return std::exp(I_unit * (pw->x0 * x + pw->y0 * y));
    const auto& g = std::get<PolyGaussian>(t);
    const double sx = x - g.cx;
    const double sy = y - g.cy;
    cplx poly = 0.0;
    for (const auto& [key, c] : g.coeffs) poly += c * std::pow(sx, key.first) * std::pow(sy, key.second);
    return poly * std::exp(-g.alpha * (sx * sx + sy * sy)) * std::exp(I_unit * (g.px * x + g.py * y));
}

cplx poly_gaussian_inverse_fourier(const PolyGaussian& g, double u, double v) {
    const double wx = g.px - u;
    const double wy = g.py - v;
    cplx sum = 0.0;
    for (const auto& [key, c] : g.coeffs) {
        if (c == cplx(0.0)) continue;
        sum += c * moment_transform(key.first, g.alpha, wx) * moment_transform(key.second, g.alpha, wy);
    }
    return sum * std::exp(I_unit * (wx * g.cx + wy * g.cy)) / (2.0 * M_PI);
}

cplx Symbol::value(double x, double y) const {
    cplx s = 0.0;
    for (const auto& [w, t] : terms_) s += w * term_value(t, x, y);
    return s;
}

Symbol Symbol::dx() const {
    Symbol out;
    for (const auto& [w, t] : terms_) {
        if (const auto* pw = std::get_if<PlaneWave>(&t)) {
            if (pw->x0 != 0.0) out.terms_.emplace_back(w * I_unit * pw->x0, *pw);
        } else {
            out.terms_.emplace_back(w, derive(std::get<PolyGaussian>(t), true));
        }
    }
    return out;
}

Symbol Symbol::dy() const {
    Symbol out;
    for (const auto& [w, t] : terms_) {
        if (const auto* pw = std::get_if<PlaneWave>(&t)) {
            if (pw->y0 != 0.0) out.terms_.emplace_back(w * I_unit * pw->y0, *pw);
        } else {
            out.terms_.emplace_back(w, derive(std::get<PolyGaussian>(t), false));
        }
    }
    return out;
}

Symbol Symbol::translate(double x0, double y0) const {
    Symbol out;
    for (const auto& [w, t] : terms_) {
        if (const auto* pw = std::get_if<PlaneWave>(&t)) {
            out.terms_.emplace_back(w * std::exp(I_unit * (pw->x0 * x0 + pw->y0 * y0)), *pw);
        } else {
            PolyGaussian g = std::get<PolyGaussian>(t);
            const cplx phase = std::exp(I_unit * (g.px * x0 + g.py * y0));
            g.cx -= x0;
            g.cy -= y0;
            out.terms_.emplace_back(w * phase, std::move(g));
        }
    }
    return out;
}

Symbol Symbol::conjugate() const {
    Symbol out;
    for (const auto& [w, t] : terms_) {
        if (const auto* pw = std::get_if<PlaneWave>(&t)) {
            out.terms_.emplace_back(std::conj(w), PlaneWave{-pw->x0, -pw->y0});
        } else {
            PolyGaussian g = std::get<PolyGaussian>(t);
            for (auto& [key, c] : g.coeffs) c = std::conj(c);
            g.px = -g.px;
            g.py = -g.py;
            out.terms_.emplace_back(std::conj(w), std::move(g));
        }
    }
    return out;
}

cplx Symbol::inverse_fourier(double u, double v) const {
    cplx s = 0.0;
    for (const auto& [w, t] : terms_) {
        if (std::holds_alternative<PlaneWave>(t)) {
            throw DomainError("inverse Fourier transform of a plane wave is a point mass");
        }
        s += w * poly_gaussian_inverse_fourier(std::get<PolyGaussian>(t), u, v);
    }
    return s;
}

Symbol& Symbol::operator+=(const Symbol& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

Symbol Symbol::operator+(const Symbol& other) const {
    Symbol out = *this;
    out += other;
    return out;
}

Symbol Symbol::operator*(cplx s) const {
    Symbol out = *this;
    for (auto& term : out.terms_) term.first *= s;
    return out;
}

}  // namespace qmall
