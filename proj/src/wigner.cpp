#include "qmall/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace qmall {

namespace {

// E[a][c] = exp(sign·2πi (a−h)(c−h)/n), h = n/2
Eigen::MatrixXcd centred_dft(int n, double sign) {
    Eigen::MatrixXcd e(n, n);
    const int h = n / 2;
    for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) {
            // reduce the integer product first to keep the phase argument small
            const long long p = static_cast<long long>(a - h) * (c - h);
            const long long r = ((p % n) + n) % n;
            const double phase = sign * 2.0 * M_PI * static_cast<double>(r) / n;
            e(a, c) = cplx(std::cos(phase), std::sin(phase));
        }
    }
    return e;
}

void require_density(const DensityGrid& w, const char* what) {
    if (w.kind != DensityGrid::Kind::density) throw DomainError(std::string(what) + ": expected a density grid");
}

cplx parse_complex(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("expected a number or [re, im]");
}

}  // namespace

void GridSpec::validate() const {
    if (nodes < 3 || nodes % 2 == 0) throw ConfigError("grid nodes must be odd and at least 3");
    if (half_width < 0.0) throw ConfigError("grid half-width must be nonnegative");
}

GridSpec resolve_grid(const DirectionPair& h, const GridSpec& grid) {
    grid.validate();
    if (grid.half_width > 0.0) return grid;
    const double m = std::min(h.k1.norm(), h.k2.norm());
    if (!(m > 0.0)) throw DomainError("default grid needs nonzero h1 and h2; set the grid half-width");
    return {8.0 / m, grid.nodes};
}

DensityGrid characteristic_function(const FockSpace& space, const State& state, const DirectionPair& h,
                                    const GridSpec& grid) {
    require_real(h, "characteristic_function");
    const GridSpec g = resolve_grid(h, grid);
    DensityGrid out;
    out.kind = DensityGrid::Kind::characteristic;
    out.n = g.nodes;
    out.step = g.half_width / (g.nodes / 2);
    std::vector<std::pair<double, double>> uv;
    uv.reserve(static_cast<std::size_t>(out.n) * out.n);
    for (int a = 0; a < out.n; ++a)
        for (int b = 0; b < out.n; ++b) uv.emplace_back(out.coord(a), out.coord(b));
    const WeylSampler sampler(space, h.k1, h.k2);
    const auto chi = sampler.expectations(state, uv);
    out.values.resize(out.n, out.n);
    for (int a = 0; a < out.n; ++a)
        for (int b = 0; b < out.n; ++b) out.values(a, b) = chi[static_cast<std::size_t>(a) * out.n + b];
    return out;
}

DensityGrid wigner_from_characteristic(const DensityGrid& chi, double boundary_threshold) {
    if (chi.kind != DensityGrid::Kind::characteristic) throw DomainError("wigner: expected a characteristic grid");
    const int n = chi.n;
    double edge = 0.0;
    for (int i = 0; i < n; ++i) {
        edge = std::max({edge, std::abs(chi.values(0, i)), std::abs(chi.values(n - 1, i)), std::abs(chi.values(i, 0)),
                         std::abs(chi.values(i, n - 1))});
    }
    if (edge > boundary_threshold) {
        std::ostringstream msg;
        msg << "characteristic function reaches " << edge << " on the grid boundary; enlarge the grid";
        throw DomainError(msg.str());
    }
    const Eigen::MatrixXcd e = centred_dft(n, -1.0);
    DensityGrid out;
    out.kind = DensityGrid::Kind::density;
    out.n = n;
    out.step = 2.0 * M_PI / (n * chi.step);
    const double c = chi.step * chi.step / (4.0 * M_PI * M_PI);
    out.values = c * (e * chi.values * e.transpose());
    return out;
}

DensityGrid characteristic_from_wigner(const DensityGrid& w) {
    require_density(w, "characteristic_from_wigner");
    const int n = w.n;
    const Eigen::MatrixXcd e = centred_dft(n, -1.0);
    DensityGrid out;
    out.kind = DensityGrid::Kind::characteristic;
    out.n = n;
    out.step = 2.0 * M_PI / (n * w.step);
    out.values = w.cell_area() * (e.adjoint() * w.values * e.conjugate());
    return out;
}

DensityGrid wigner_density(const FockSpace& space, const State& state, const DirectionPair& h, const GridSpec& grid) {
    return wigner_from_characteristic(characteristic_function(space, state, h, grid));
}

double normalization(const DensityGrid& w) {
    require_density(w, "normalization");
    return w.values.real().sum() * w.cell_area();
}

cplx grid_pairing(const DensityGrid& w, const Symbol& phi) {
    require_density(w, "grid_pairing");
    cplx s = 0.0;
    for (int a = 0; a < w.n; ++a)
        for (int b = 0; b < w.n; ++b) s += w.values(a, b).real() * phi.value(w.coord(a), w.coord(b));
    return s * w.cell_area();
}

Moments moments(const DensityGrid& w) {
    require_density(w, "moments");
    double m0 = 0.0, mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0;
    for (int a = 0; a < w.n; ++a) {
        const double x = w.coord(a);
        for (int b = 0; b < w.n; ++b) {
            const double y = w.coord(b);
            const double v = w.values(a, b).real();
            m0 += v;
            mx += v * x;
            my += v * y;
            mxx += v * x * x;
            myy += v * y * y;
        }
    }
    Moments m;
    m.mean_x = mx / m0;
    m.mean_y = my / m0;
    m.var_x = mxx / m0 - m.mean_x * m.mean_x;
    m.var_y = myy / m0 - m.mean_y * m.mean_y;
    return m;
}

double min_value(const DensityGrid& w) { return w.values.real().minCoeff(); }
double max_value(const DensityGrid& w) { return w.values.real().maxCoeff(); }

bool negativity_flag(const DensityGrid& w) { return min_value(w) < -1e-9 * max_value(w); }

std::vector<Atom> spectral_distribution(const FockOp& x, const State& state, double cluster_tol) {
    if (x.rows() != x.cols()) throw DimensionMismatch("spectral_distribution: operator is not square");
    if ((x - x.adjoint()).norm() > 1e-10) throw DomainError("spectral_distribution: operator is not Hermitian");
    if (x.rows() != state.dim()) throw DimensionMismatch("spectral_distribution: operator size differs from state");
    const Eigen::SelfAdjointEigenSolver<FockOp> es(x);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const FockOp& v = es.eigenvectors();
    Eigen::VectorXd p(lam.size());
    if (state.is_vector()) {
        p = (v.adjoint() * state.omega()).cwiseAbs2();
    } else {
        p = (v.adjoint() * state.rho() * v).diagonal().real();
    }
    std::vector<Atom> out;
    for (Index i = 0; i < lam.size(); ++i) {
        if (!out.empty() && lam(i) - out.back().eigenvalue <= cluster_tol) {
            out.back().weight += p(i);
        } else {
            out.push_back({lam(i), p(i)});
        }
    }
    for (auto& a : out) a.weight = std::max(a.weight, 0.0);
    return out;
}

bool RegularityEstimate::chain_holds() const {
    const double slack = 1e-12 * (1.0 + trace_norm * fourier_l1);
    return std::abs(rhs) <= trace_norm * operator_norm + slack && operator_norm <= fourier_l1 + 1e-12 * fourier_l1 + 1e-15;
}

double fourier_l1_norm(const Symbol& phi, const QuadratureSpec& quad) {
    double s = 0.0;
    for (const auto& [w, t] : phi.terms()) {
        if (std::holds_alternative<PlaneWave>(t)) {
            s += std::abs(w);
            continue;
        }
        const auto& g = std::get<PolyGaussian>(t);
        const QuadratureGrid grid = quadrature_grid(g, quad);
        double acc = 0.0;
        for (const auto& node : grid.nodes) acc += node.weight * std::abs(poly_gaussian_inverse_fourier(g, node.u, node.v));
        s += std::abs(w) * acc / (2.0 * M_PI);
    }
    return s;
}

RegularityEstimate regularity_estimate(const FockSpace& space, const FockOp& rho, const DirectionPair& h,
                                       const DirectionPair& k, const DirectionPair& l, const Symbol& phi, int kappa1,
                                       int kappa2, const QuadratureSpec& quad) {
    if (kappa1 < 0 || kappa2 < 0) throw DomainError("regularity_estimate: derivative orders must be nonnegative");
    require_same_size(space, rho.rows(), rho.cols(), "regularity_estimate");
    const RegularityGenerators gen = regularity_generators(space, h, k, l);
    Symbol d = phi;
    for (int i = 0; i < kappa1; ++i) d = d.dx();
    for (int i = 0; i < kappa2; ++i) d = d.dy();
    FockOp c = rho;
    for (int i = 0; i < kappa1; ++i) c = commutator(gen.x1, c);
    for (int i = 0; i < kappa2; ++i) c = commutator(gen.x2, c);
    const FockOp o = quantize(space, h, phi, quad);
    const double sign = (kappa1 + kappa2) % 2 == 0 ? 1.0 : -1.0;
    RegularityEstimate r;
    r.lhs = (rho.transpose().array() * quantize(space, h, d, quad).array()).sum();
    r.rhs = sign * (c.transpose().array() * o.array()).sum();
    r.trace_norm = Eigen::JacobiSVD<FockOp>(c).singularValues().sum();
    r.operator_norm = Eigen::JacobiSVD<FockOp>(o).singularValues()(0);
    r.fourier_l1 = fourier_l1_norm(phi, quad);
    return r;
}

State state_from_json(const FockSpace& space, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("state file must be a JSON object");
    if (j.contains("coefficients")) {
        const auto& c = j.at("coefficients");
        if (!c.is_array() || static_cast<Index>(c.size()) != space.dim()) {
            std::ostringstream msg;
            msg << "state coefficients: expected " << space.dim() << " entries";
            throw ConfigError(msg.str());
        }
        FockVec v(space.dim());
        for (Index i = 0; i < space.dim(); ++i) v(i) = parse_complex(c[static_cast<std::size_t>(i)]);
        return State::normalized(v);
    }
    if (j.contains("superposition")) {
        FockVec v = FockVec::Zero(space.dim());
        for (const auto& term : j.at("superposition")) {
            const cplx w = term.contains("weight") ? parse_complex(term.at("weight")) : cplx(1.0);
            const auto& k = term.at("k");
            if (!k.is_array() || static_cast<int>(k.size()) != space.modes())
                throw ConfigError("superposition: k must have one entry per mode");
            HVec kv(space.modes());
            for (int i = 0; i < space.modes(); ++i) kv(i) = parse_complex(k[static_cast<std::size_t>(i)]);
            v += w * exponential_vector(space, kv);
        }
        return State::normalized(v);
    }
    throw ConfigError("state file needs \"coefficients\" or \"superposition\"");
}

void write_csv(std::ostream& os, const DensityGrid& g) {
    char buf[128];
    if (g.kind == DensityGrid::Kind::density) {
        os << "x,y,value\n";
    } else {
        os << "u,v,re,im\n";
    }
    for (int a = 0; a < g.n; ++a) {
        for (int b = 0; b < g.n; ++b) {
            const cplx z = g.values(a, b);
            if (g.kind == DensityGrid::Kind::density) {
                std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", g.coord(a), g.coord(b), z.real());
            } else {
                std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e\n", g.coord(a), g.coord(b), z.real(), z.imag());
            }
            os << buf;
        }
    }
}

}  // namespace qmall
