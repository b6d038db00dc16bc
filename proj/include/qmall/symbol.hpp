#pragma once

#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "qmall/types.hpp"

namespace qmall {

// φ(x,y) = e^{i(x0·x + y0·y)}
struct PlaneWave {
    double x0 = 0.0;
    double y0 = 0.0;
};

// φ(x,y) = Σ c_ab (x−cx)^a (y−cy)^b · e^{−α((x−cx)²+(y−cy)²)} · e^{i(px·x + py·y)}
struct PolyGaussian {
    std::map<std::pair<int, int>, cplx> coeffs;
    double alpha = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    double px = 0.0;
    double py = 0.0;

    int degree() const;
};

using SymbolTerm = std::variant<PlaneWave, PolyGaussian>;

// Weighted sum of closed-form terms; 𝓕⁻¹ψ(u,v) = (1/2π)∫ψ(x,y)e^{−i(ux+vy)}dxdy.
class Symbol {
public:
    Symbol() = default;

    static Symbol plane_wave(double x0, double y0);
    static Symbol gaussian_packet(double alpha, double cx = 0.0, double cy = 0.0, double px = 0.0, double py = 0.0);
    static Symbol poly_gaussian(PolyGaussian g);
    static Symbol constant(cplx c);

    const std::vector<std::pair<cplx, SymbolTerm>>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    cplx value(double x, double y) const;
    Symbol dx() const;
    Symbol dy() const;
    // (T_{(x0,y0)}φ)(x,y) = φ(x+x0, y+y0)
    Symbol translate(double x0, double y0) const;
    Symbol conjugate() const;
    // Undefined for PlaneWave terms (distributional); throws DomainError.
    cplx inverse_fourier(double u, double v) const;

    Symbol& operator+=(const Symbol& other);
    Symbol operator+(const Symbol& other) const;
    Symbol operator*(cplx s) const;
    friend Symbol operator*(cplx s, const Symbol& phi) { return phi * s; }

private:
    std::vector<std::pair<cplx, SymbolTerm>> terms_;
};

cplx term_value(const SymbolTerm& t, double x, double y);
// (1/2π)∫ term·e^{−i(ux+vy)} for a PolyGaussian term
cplx poly_gaussian_inverse_fourier(const PolyGaussian& g, double u, double v);

}  // namespace qmall
