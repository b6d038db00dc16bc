#pragma once

#include <utility>
#include <vector>

#include "qmall/operators.hpp"
#include "qmall/state.hpp"
#include "qmall/symbol.hpp"

namespace qmall {

// Square (u,v) domain per Gaussian term, centred at its frequency centre.
// half_width = 0 selects 2√α(7 + deg/2) per term.
struct QuadratureSpec {
    double half_width = 0.0;
    int nodes = 129;
    void validate() const;
};

// U(u·h1, v·h2) for fixed real h over many nodes.
// When h1 ∥ h2 the rotation e^{−iθN_e} Q(e) e^{iθN_e} = cosθ Q(e) + sinθ P(e) reduces every node
// to one precomputed eigendecomposition.
class WeylSampler {
public:
    WeylSampler(const FockSpace& space, const HVec& h1, const HVec& h2);

    FockOp at(double u, double v) const;
    std::vector<cplx> expectations(const State& state, const std::vector<std::pair<double, double>>& nodes) const;
    // Σ c_i U(u_i h1, v_i h2)
    FockOp weighted_sum(const std::vector<std::pair<double, double>>& nodes, const std::vector<cplx>& coefficients) const;
    bool uses_rotation() const { return rotation_; }

private:
    struct Rotation {
        double a = 0.0;  // h1 = a·e
        double b = 0.0;  // h2 = b·e
        bool aligned = false;
        Eigen::VectorXd nu;   // spectrum of N_e
        FockOp w;             // eigenvectors of N_e (unused when aligned)
        Eigen::VectorXd lambda;  // spectrum of Q(e)
        FockOp m;             // W†V
    };

    void polar(double u, double v, double& r, double& theta) const;

    const FockSpace* space_;
    HVec h1_;
    HVec h2_;
    bool rotation_ = false;
    Rotation rot_;
    FockOp p_;
    FockOp q_;
};

struct QuadratureNode {
    double u;
    double v;
    double weight;  // trapezoid weight × du dv
};

struct QuadratureGrid {
    std::vector<QuadratureNode> nodes;
    double centre_u = 0.0;
    double centre_v = 0.0;
    double half_width = 0.0;
};

// Throws DomainError if |𝓕⁻¹φ| on the boundary exceeds 1e-10 of its maximum.
QuadratureGrid quadrature_grid(const PolyGaussian& g, const QuadratureSpec& quad);

// O_h(φ) = (1/2π)∫𝓕⁻¹φ(u,v) U(uh1,vh2) du dv; plane waves map to U(x0h1, y0h2) exactly.
FockOp quantize(const FockSpace& space, const DirectionPair& h, const Symbol& phi, const QuadratureSpec& quad = {});

// Φ(O_h(φ)) with Φ applied inside the quadrature sum.
cplx pair_expectation(const FockSpace& space, const State& state, const DirectionPair& h, const Symbol& phi,
                      const QuadratureSpec& quad = {});

// U(−k2/2, k1/2)·M·U(−k2/2, k1/2)*
FockOp conjugate_by_weyl(const FockSpace& space, const DirectionPair& k, const FockOp& m);

struct RegularityGenerators {
    FockOp x1;
    FockOp x2;
    Eigen::Matrix2cd a;
};

// (X1,X2)ᵀ = (i/2)A⁻¹(Q(k1)−P(k2), Q(l1)−P(l2))ᵀ with
// A = [[⟨h1,k1⟩,⟨h2,k2⟩],[⟨h1,l1⟩,⟨h2,l2⟩]].
RegularityGenerators regularity_generators(const FockSpace& space, const DirectionPair& h, const DirectionPair& k,
                                           const DirectionPair& l, double det_tolerance = 1e-12);

void require_real(const DirectionPair& h, const char* what);

}  // namespace qmall
