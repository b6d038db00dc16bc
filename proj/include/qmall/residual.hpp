#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qmall/fock_space.hpp"

namespace qmall {

// Unit vectors used to test operator identities through matrix elements:
// the vacuum plus normalized ℰ(k) with ‖k‖ ≤ radius.
struct ProbeSet {
    FockOp columns;        // dim × count, normalized
    std::vector<HVec> args;  // exponential-vector arguments (zero for the vacuum)
};

ProbeSet make_probes(const FockSpace& space, int count, std::uint64_t seed, double radius = 0.5);

// max_{a,b} |⟨ψ_a, R ψ_b⟩|
double probe_residual(const FockOp& r, const ProbeSet& probes);

// Frobenius norm of Π_d R Π_d
double interior_residual(const FockSpace& space, const FockOp& r, int d);

double frobenius(const FockOp& r);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0);
    double normal();
    // Uniform direction, norm exactly `norm`.
    HVec real_direction(int modes, double norm);
    HVec complex_direction(int modes, double norm);
    // Norm uniform in (0, max_norm].
    HVec real_ball(int modes, double max_norm);
    HVec complex_ball(int modes, double max_norm);
    FockOp random_matrix(Index n);
    FockOp random_hermitian(Index n);

private:
    std::mt19937_64 engine_;
};

}  // namespace qmall
