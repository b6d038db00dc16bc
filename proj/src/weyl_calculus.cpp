#include "qmall/weyl_calculus.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace qmall {

namespace {

constexpr double kBoundaryThreshold = 1e-10;
constexpr double kNegligible = 1e-17;

struct GaussianGroup {
    double pu = 0.0;
    double pv = 0.0;
    double half_width = 0.0;
    std::vector<std::pair<cplx, const PolyGaussian*>> terms;
};

double auto_half_width(const PolyGaussian& g) { return 2.0 * std::sqrt(g.alpha) * (7.0 + 0.5 * g.degree()); }

std::vector<GaussianGroup> group_terms(const Symbol& phi, const QuadratureSpec& quad) {
    std::map<std::tuple<double, double, double>, GaussianGroup> groups;
    for (const auto& [w, t] : phi.terms()) {
        const auto* g = std::get_if<PolyGaussian>(&t);
        if (g == nullptr) continue;
        const double hw = quad.half_width > 0.0 ? quad.half_width : auto_half_width(*g);
        auto& grp = groups[{g->px, g->py, hw}];
        grp.pu = g->px;
        grp.pv = g->py;
        grp.half_width = hw;
        grp.terms.emplace_back(w, g);
    }
    std::vector<GaussianGroup> out;
    for (auto& [key, grp] : groups) out.push_back(std::move(grp));
    return out;
}

struct WeightedNode {
    double u;
    double v;
    cplx coefficient;  // trapezoid weight × 𝓕⁻¹φ(u,v) / 2π
};

std::vector<WeightedNode> group_nodes(const GaussianGroup& grp, int n) {
    const double step = 2.0 * grp.half_width / (n - 1);
    std::vector<cplx> values(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    double fmax = 0.0;
    double boundary = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = grp.pu - grp.half_width + i * step;
        for (int j = 0; j < n; ++j) {
            const double v = grp.pv - grp.half_width + j * step;
            cplx f = 0.0;
            for (const auto& [w, g] : grp.terms) f += w * poly_gaussian_inverse_fourier(*g, u, v);
            values[static_cast<std::size_t>(i) * n + j] = f;
            fmax = std::max(fmax, std::abs(f));
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) boundary = std::max(boundary, std::abs(f));
        }
    }
    if (fmax > 0.0 && boundary > kBoundaryThreshold * fmax) {
        std::ostringstream msg;
        msg << "quadrature domain too small: |inverse Fourier transform| on the boundary is " << boundary / fmax
            << " of its maximum (half-width " << grp.half_width << ")";
        throw DomainError(msg.str());
    }
    std::vector<WeightedNode> out;
    for (int i = 0; i < n; ++i) {
        const double wu = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < n; ++j) {
            const double wv = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            const cplx f = values[static_cast<std::size_t>(i) * n + j];
            if (std::abs(f) <= kNegligible * fmax) continue;
            out.push_back({grp.pu - grp.half_width + i * step, grp.pv - grp.half_width + j * step,
                           f * (wu * wv * step * step / (2.0 * M_PI))});
        }
    }
    return out;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (nodes < 3 || nodes % 2 == 0) throw DomainError("quadrature node count must be odd and at least 3");
    if (half_width < 0.0) throw DomainError("quadrature half-width must be nonnegative");
}

void require_real(const DirectionPair& h, const char* what) {
    if (!h.is_real()) {
        std::ostringstream msg;
        msg << what << ": direction pair must be real";
        throw DomainError(msg.str());
    }
}

WeylSampler::WeylSampler(const FockSpace& space, const HVec& h1, const HVec& h2) : space_(&space), h1_(h1), h2_(h2) {
    if (h1.size() != space.modes() || h2.size() != space.modes()) throw DimensionMismatch("WeylSampler: mode count mismatch");
    require_real({h1, h2}, "WeylSampler");
    const Eigen::VectorXd r1 = h1.real();
    const Eigen::VectorXd r2 = h2.real();
    const double n1 = r1.norm();
    const double n2 = r2.norm();

    Eigen::VectorXd e;
    bool parallel = false;
    if (n1 > 0.0) {
        e = r1 / n1;
        rot_.a = n1;
        rot_.b = e.dot(r2);
        parallel = (r2 - rot_.b * e).norm() <= 1e-13 * std::max(1.0, n2);
    } else if (n2 > 0.0) {
        e = r2 / n2;
        rot_.a = 0.0;
        rot_.b = n2;
        parallel = true;
    } else {
        e = Eigen::VectorXd::Zero(space.modes());
        e(0) = 1.0;
        parallel = true;
    }

    int nonzero = 0;
    int mode = 0;
    for (int j = 0; j < space.modes(); ++j) {
        if (e(j) != 0.0) {
            ++nonzero;
            mode = j;
        }
    }
    rot_.aligned = nonzero == 1 && std::abs(e(mode)) == 1.0;
    if (rot_.aligned && e(mode) < 0.0) {
        rot_.a = -rot_.a;
        rot_.b = -rot_.b;
        e(mode) = 1.0;
    }

    if (parallel && (rot_.aligned || space.truncation() == Truncation::total)) {
        const HVec ec = e.cast<cplx>();
        Eigen::SelfAdjointEigenSolver<FockOp> qs(position(space, ec));
        rot_.lambda = qs.eigenvalues();
        if (rot_.aligned) {
            rot_.nu.resize(space.dim());
            for (Index i = 0; i < space.dim(); ++i) rot_.nu(i) = space.tuple_of(i)[static_cast<std::size_t>(mode)];
            rot_.m = qs.eigenvectors();
            rotation_ = true;
        } else {
            const FockOp ne = creation(space, ec) * annihilation(space, ec);
            Eigen::SelfAdjointEigenSolver<FockOp> ns(ne);
            const Eigen::VectorXd nu = ns.eigenvalues();
            const double off = (nu.array() - nu.array().round()).abs().maxCoeff();
            if (off <= 1e-8) {
                rot_.nu = nu.array().round().matrix();
                rot_.w = ns.eigenvectors();
                rot_.m = rot_.w.adjoint() * qs.eigenvectors();
                rotation_ = true;
            }
        }
    }
    if (!rotation_) {
        p_ = momentum(space, h1);
        q_ = position(space, h2);
    }
}

void WeylSampler::polar(double u, double v, double& r, double& theta) const {
    const double alpha = u * rot_.a;
    const double beta = v * rot_.b;
    r = std::hypot(alpha, beta);
    theta = std::atan2(alpha, beta);
}

FockOp WeylSampler::at(double u, double v) const {
    if (!rotation_) {
        if (space_->truncation() == Truncation::per_mode && space_->modes() > 1) {
            return weyl(*space_, HVec(u * h1_), HVec(v * h2_));
        }
        Eigen::SelfAdjointEigenSolver<FockOp> es(u * p_ + v * q_);
        const Eigen::VectorXcd ph = (I_unit * es.eigenvalues().cast<cplx>()).array().exp();
        return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    }
    double r = 0.0;
    double theta = 0.0;
    polar(u, v, r, theta);
    const Eigen::VectorXcd e = (cplx(0.0, -theta) * rot_.nu.cast<cplx>()).array().exp();
    const Eigen::VectorXcd d = (cplx(0.0, r) * rot_.lambda.cast<cplx>()).array().exp();
    const FockOp x = e.asDiagonal() * rot_.m;
    FockOp z = (x * d.asDiagonal()) * x.adjoint();
    if (rot_.aligned) return z;
    return rot_.w * z * rot_.w.adjoint();
}

FockOp WeylSampler::weighted_sum(const std::vector<std::pair<double, double>>& nodes,
                                 const std::vector<cplx>& coefficients) const {
    if (nodes.size() != coefficients.size()) throw DimensionMismatch("weighted_sum: node and coefficient counts differ");
    const Index dim = space_->dim();
    if (!rotation_) {
        FockOp out = FockOp::Zero(dim, dim);
        for (std::size_t i = 0; i < nodes.size(); ++i) out += coefficients[i] * at(nodes[i].first, nodes[i].second);
        return out;
    }
    // Z_pq = Σ_k M_pk conj(M_qk) T(ν_p−ν_q, k) with T(d,k) = Σ_i c_i e^{−iθ_i d} e^{i r_i λ_k}
    const int numax = static_cast<int>(std::lround(rot_.nu.maxCoeff()));
    const Index span = 2 * numax + 1;
    const Index count = static_cast<Index>(nodes.size());
    Eigen::MatrixXcd a(count, span);
    Eigen::MatrixXcd b(count, dim);
    for (Index i = 0; i < count; ++i) {
        double r = 0.0;
        double theta = 0.0;
        polar(nodes[static_cast<std::size_t>(i)].first, nodes[static_cast<std::size_t>(i)].second, r, theta);
        const cplx c = coefficients[static_cast<std::size_t>(i)];
        for (Index d = 0; d < span; ++d) a(i, d) = c * std::exp(cplx(0.0, -theta * static_cast<double>(d - numax)));
        b.row(i) = (cplx(0.0, r) * rot_.lambda.cast<cplx>()).array().exp().transpose();
    }
    const Eigen::MatrixXcd t = a.transpose() * b;
    FockOp z(dim, dim);
    const FockOp mc = rot_.m.conjugate();
    for (Index q = 0; q < dim; ++q) {
        for (Index p = 0; p < dim; ++p) {
            const Index d = static_cast<Index>(std::lround(rot_.nu(p) - rot_.nu(q))) + numax;
            z(p, q) = (rot_.m.row(p).array() * mc.row(q).array() * t.row(d).array()).sum();
        }
    }
    if (rot_.aligned) return z;
    return rot_.w * z * rot_.w.adjoint();
}

std::vector<cplx> WeylSampler::expectations(const State& state, const std::vector<std::pair<double, double>>& nodes) const {
    if (state.dim() != space_->dim()) throw DimensionMismatch("WeylSampler: state dimension mismatch");
    std::vector<cplx> out;
    out.reserve(nodes.size());
    if (!rotation_) {
        if (space_->truncation() == Truncation::per_mode && space_->modes() > 1) {
            for (const auto& [u, v] : nodes) out.push_back(state.expect(at(u, v)));
            return out;
        }
        for (const auto& [u, v] : nodes) {
            Eigen::SelfAdjointEigenSolver<FockOp> es(u * p_ + v * q_);
            const Eigen::VectorXcd ph = (I_unit * es.eigenvalues().cast<cplx>()).array().exp();
            if (state.is_vector()) {
                const Eigen::VectorXcd y = es.eigenvectors().adjoint() * state.omega();
                out.push_back((ph.array() * y.array().abs2().cast<cplx>()).sum());
            } else {
                const FockOp t = es.eigenvectors().adjoint() * state.rho() * es.eigenvectors();
                out.push_back((ph.array() * t.diagonal().array()).sum());
            }
        }
        return out;
    }

    auto vector_values = [&](const FockVec& omega, double weight, std::vector<cplx>& acc) {
        const FockVec wt = rot_.aligned ? omega : FockVec(rot_.w.adjoint() * omega);
        const FockOp madj = rot_.m.adjoint();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double r = 0.0;
            double theta = 0.0;
            polar(nodes[i].first, nodes[i].second, r, theta);
            const Eigen::VectorXcd ec = (cplx(0.0, theta) * rot_.nu.cast<cplx>()).array().exp();
            const Eigen::VectorXcd y = madj * (ec.array() * wt.array()).matrix();
            const Eigen::VectorXcd d = (cplx(0.0, r) * rot_.lambda.cast<cplx>()).array().exp();
            acc[i] += weight * (d.array() * y.array().abs2().cast<cplx>()).sum();
        }
    };

    out.assign(nodes.size(), cplx(0.0));
    if (state.is_vector()) {
        vector_values(state.omega(), 1.0, out);
        return out;
    }
    const FockOp& rho = state.rho();
    const FockOp rt = rot_.aligned ? rho : FockOp(rot_.w.adjoint() * rho * rot_.w);
    double offblock = 0.0;
    for (Index j = 0; j < rt.cols(); ++j) {
        for (Index i = 0; i < rt.rows(); ++i) {
            if (rot_.nu(i) != rot_.nu(j)) offblock = std::max(offblock, std::abs(rt(i, j)));
        }
    }
    if (offblock <= 1e-14 * std::max(1e-300, rt.cwiseAbs().maxCoeff())) {
        const Eigen::VectorXcd diag = (rot_.m.adjoint() * rt * rot_.m).diagonal();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double r = 0.0;
            double theta = 0.0;
            polar(nodes[i].first, nodes[i].second, r, theta);
            const Eigen::VectorXcd d = (cplx(0.0, r) * rot_.lambda.cast<cplx>()).array().exp();
            out[i] = (d.array() * diag.array()).sum();
        }
        return out;
    }
    Eigen::SelfAdjointEigenSolver<FockOp> es(rho);
    const double pmax = es.eigenvalues().cwiseAbs().maxCoeff();
    for (Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double p = es.eigenvalues()(k);
        if (std::abs(p) <= 1e-16 * pmax) continue;
        vector_values(es.eigenvectors().col(k), p, out);
    }
    return out;
}

QuadratureGrid quadrature_grid(const PolyGaussian& g, const QuadratureSpec& quad) {
    quad.validate();
    GaussianGroup grp;
    grp.pu = g.px;
    grp.pv = g.py;
    grp.half_width = quad.half_width > 0.0 ? quad.half_width : auto_half_width(g);
    grp.terms.emplace_back(1.0, &g);
    QuadratureGrid out;
    out.centre_u = grp.pu;
    out.centre_v = grp.pv;
    out.half_width = grp.half_width;
    const int n = quad.nodes;
    const double step = 2.0 * grp.half_width / (n - 1);
    (void)group_nodes(grp, n);  // boundary check
    for (int i = 0; i < n; ++i) {
        const double wu = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < n; ++j) {
            const double wv = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            out.nodes.push_back({grp.pu - grp.half_width + i * step, grp.pv - grp.half_width + j * step,
                                 wu * wv * step * step});
        }
    }
    return out;
}

FockOp quantize(const FockSpace& space, const DirectionPair& h, const Symbol& phi, const QuadratureSpec& quad) {
    quad.validate();
    require_real(h, "quantize");
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (const auto& [w, t] : phi.terms()) {
        if (const auto* pw = std::get_if<PlaneWave>(&t)) out += w * weyl(space, HVec(pw->x0 * h.k1), HVec(pw->y0 * h.k2));
    }
    const auto groups = group_terms(phi, quad);
    if (groups.empty()) return out;
    const WeylSampler sampler(space, h.k1, h.k2);
    for (const auto& grp : groups) {
        std::vector<std::pair<double, double>> uv;
        std::vector<cplx> c;
        for (const auto& node : group_nodes(grp, quad.nodes)) {
            uv.emplace_back(node.u, node.v);
            c.push_back(node.coefficient);
        }
        out += sampler.weighted_sum(uv, c);
    }
    return out;
}

cplx pair_expectation(const FockSpace& space, const State& state, const DirectionPair& h, const Symbol& phi,
                      const QuadratureSpec& quad) {
    quad.validate();
    require_real(h, "pair_expectation");
    cplx out = 0.0;
    for (const auto& [w, t] : phi.terms()) {
        if (const auto* pw = std::get_if<PlaneWave>(&t)) {
            out += w * state.expect(weyl(space, HVec(pw->x0 * h.k1), HVec(pw->y0 * h.k2)));
        }
    }
    const auto groups = group_terms(phi, quad);
    if (groups.empty()) return out;
    const WeylSampler sampler(space, h.k1, h.k2);
    for (const auto& grp : groups) {
        const auto nodes = group_nodes(grp, quad.nodes);
        std::vector<std::pair<double, double>> uv;
        uv.reserve(nodes.size());
        for (const auto& n : nodes) uv.emplace_back(n.u, n.v);
        const auto chi = sampler.expectations(state, uv);
        for (std::size_t i = 0; i < nodes.size(); ++i) out += nodes[i].coefficient * chi[i];
    }
    return out;
}

FockOp conjugate_by_weyl(const FockSpace& space, const DirectionPair& k, const FockOp& m) {
    require_real(k, "conjugate_by_weyl");
    require_same_size(space, m.rows(), m.cols(), "conjugate_by_weyl");
    const FockOp u = weyl(space, HVec(-0.5 * k.k2), HVec(0.5 * k.k1));
    return u * m * u.adjoint();
}

RegularityGenerators regularity_generators(const FockSpace& space, const DirectionPair& h, const DirectionPair& k,
                                           const DirectionPair& l, double det_tolerance) {
    require_real(h, "regularity_generators");
    RegularityGenerators out;
    out.a << inner_h(h.k1, k.k1), inner_h(h.k2, k.k2), inner_h(h.k1, l.k1), inner_h(h.k2, l.k2);
    const cplx det = out.a.determinant();
    if (std::abs(det) <= det_tolerance) {
        std::ostringstream msg;
        msg << "regularity_generators: |det A| = " << std::abs(det) << " is below tolerance";
        throw SingularDirectionError(msg.str());
    }
    const Eigen::Matrix2cd inv = out.a.inverse();
    const FockOp yk = 0.5 * I_unit * (position(space, k.k1) - momentum(space, k.k2));
    const FockOp yl = 0.5 * I_unit * (position(space, l.k1) - momentum(space, l.k2));
    out.x1 = inv(0, 0) * yk + inv(0, 1) * yl;
    out.x2 = inv(1, 0) * yk + inv(1, 1) * yl;
    return out;
}

}  // namespace qmall
