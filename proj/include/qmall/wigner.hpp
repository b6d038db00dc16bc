#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qmall/state.hpp"
#include "qmall/weyl_calculus.hpp"

namespace qmall {

// Symmetric (u,v) grid; half_width = 0 selects 8/min(‖h1‖,‖h2‖).
struct GridSpec {
    double half_width = 0.0;
    int nodes = 129;
    void validate() const;
};

GridSpec resolve_grid(const DirectionPair& h, const GridSpec& grid);

// Samples on an n×n grid, values(a,b) at (coord(a), coord(b)).
struct DensityGrid {
    enum class Kind { characteristic, density };
    Kind kind = Kind::characteristic;
    int n = 0;
    double step = 0.0;
    Eigen::MatrixXcd values;

    double coord(int i) const { return (i - n / 2) * step; }
    double half_width() const { return (n / 2) * step; }
    double cell_area() const { return step * step; }
};

// χ(u,v) = Φ(U(uh1, vh2))
DensityGrid characteristic_function(const FockSpace& space, const State& state, const DirectionPair& h,
                                    const GridSpec& grid = {});

// w(x,y) = (1/(2π)²)∫χ(u,v)e^{−i(ux+vy)}dudv as a Riemann sum, on the dual grid Δx = 2π/(nΔu).
// Throws DomainError when |χ| on the grid boundary exceeds boundary_threshold.
DensityGrid wigner_from_characteristic(const DensityGrid& chi, double boundary_threshold = 1e-8);
// Exact discrete inverse of wigner_from_characteristic.
DensityGrid characteristic_from_wigner(const DensityGrid& w);

DensityGrid wigner_density(const FockSpace& space, const State& state, const DirectionPair& h,
                           const GridSpec& grid = {});

double normalization(const DensityGrid& w);
cplx grid_pairing(const DensityGrid& w, const Symbol& phi);

struct Moments {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
};
Moments moments(const DensityGrid& w);

double min_value(const DensityGrid& w);
double max_value(const DensityGrid& w);
bool negativity_flag(const DensityGrid& w);

struct Atom {
    double eigenvalue;
    double weight;
};

// Eigenvalues within cluster_tol are merged into one atom.
std::vector<Atom> spectral_distribution(const FockOp& x, const State& state, double cluster_tol = 1e-9);

// tr(ρ O(∂x^κ1 ∂y^κ2 φ)) against (−1)^{κ1+κ2} tr(C O(φ)), C = ad_{X2}^{κ2} ad_{X1}^{κ1}(ρ),
// and the chain |tr(C O(φ))| ≤ ‖C‖₁‖O(φ)‖ ≤ ‖C‖₁ (1/2π)‖𝓕⁻¹φ‖_{L¹}.
struct RegularityEstimate {
    cplx lhs;
    cplx rhs;
    double trace_norm = 0.0;
    double operator_norm = 0.0;
    double fourier_l1 = 0.0;

    double identity_residual() const { return std::abs(lhs - rhs); }
    bool chain_holds() const;
};

RegularityEstimate regularity_estimate(const FockSpace& space, const FockOp& rho, const DirectionPair& h,
                                       const DirectionPair& k, const DirectionPair& l, const Symbol& phi, int kappa1,
                                       int kappa2, const QuadratureSpec& quad = {});

// (1/2π)∫|𝓕⁻¹φ| over the quadrature domains of φ's terms.
double fourier_l1_norm(const Symbol& phi, const QuadratureSpec& quad = {});

// {"coefficients": [[re,im],...]} or {"superposition": [{"weight": [re,im], "k": [[re,im],...]}, ...]}
State state_from_json(const FockSpace& space, const nlohmann::json& j);

// `x,y,value` for densities, `u,v,re,im` for characteristic grids, %.16e.
void write_csv(std::ostream& os, const DensityGrid& g);

}  // namespace qmall
