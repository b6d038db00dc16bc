#include "qmall/white_noise.hpp"

#include <cmath>
#include <sstream>

#include "qmall/operators.hpp"

namespace qmall {

namespace {

bool is_zero(const FockOp& x) { return x.size() == 0 || x.isZero(0.0); }

void check_process(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc) {
    grid.validate();
    if (space.modes() != grid.n) throw DimensionMismatch("process: space modes must equal the bin count");
    if (static_cast<int>(proc.x1.size()) != grid.n || static_cast<int>(proc.x2.size()) != grid.n)
        throw DimensionMismatch("process: one X1 and one X2 operator per bin required");
    for (const auto* xs : {&proc.x1, &proc.x2})
        for (const auto& x : *xs)
            if (x.size() != 0) require_same_size(space, x.rows(), x.cols(), "process");
}

HVec parse_hvec(const nlohmann::json& v, int modes, const char* what) {
    if (!v.is_array() || static_cast<int>(v.size()) != modes) {
        std::ostringstream msg;
        msg << what << ": expected " << modes << " entries";
        throw ConfigError(msg.str());
    }
    HVec h(modes);
    for (int i = 0; i < modes; ++i) {
        const auto& e = v[static_cast<std::size_t>(i)];
        if (e.is_number()) {
            h(i) = e.get<double>();
        } else if (e.is_array() && e.size() == 2) {
            h(i) = cplx(e[0].get<double>(), e[1].get<double>());
        } else {
            throw ConfigError(std::string(what) + ": entries must be numbers or [re, im]");
        }
    }
    return h;
}

LadderKind parse_ladder(const std::string& s) {
    if (s == "create") return LadderKind::create;
    if (s == "annihilate") return LadderKind::annihilate;
    if (s == "position") return LadderKind::position;
    if (s == "momentum") return LadderKind::momentum;
    if (s == "number") return LadderKind::number;
    throw ConfigError("unknown ladder kind '" + s + "'");
}

}  // namespace

void TimeGrid::validate() const {
    if (!(T > 0.0)) throw ConfigError("time horizon must be positive");
    if (n < 1) throw ConfigError("bin count must be positive");
}

HVec TimeGrid::bin_mode(int j) const {
    if (j < 0 || j >= n) throw DomainError("bin index out of range");
    return std::sqrt(delta()) * basis_vector(n, j);
}

HVec TimeGrid::indicator(int j) const {
    if (j < 0 || j > n) throw DomainError("indicator index out of range");
    HVec h = HVec::Zero(n);
    h.head(j).setConstant(std::sqrt(delta()));
    return h;
}

HVec TimeGrid::refine_vector(const HVec& coarse) const {
    if (coarse.size() != n) throw DimensionMismatch("refine_vector: size differs from bin count");
    HVec fine(2 * n);
    for (int j = 0; j < n; ++j) {
        fine(2 * j) = coarse(j) / std::sqrt(2.0);
        fine(2 * j + 1) = coarse(j) / std::sqrt(2.0);
    }
    return fine;
}

StepProcessPair zero_process(const FockSpace& space, const TimeGrid& grid) {
    grid.validate();
    const FockOp z = FockOp::Zero(space.dim(), space.dim());
    return {std::vector<FockOp>(static_cast<std::size_t>(grid.n), z), std::vector<FockOp>(static_cast<std::size_t>(grid.n), z),
            false};
}

ElementaryField process_to_field(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc) {
    check_process(space, grid, proc);
    const HVec zero = HVec::Zero(grid.n);
    ElementaryField u;
    for (int j = 0; j < grid.n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (!is_zero(proc.x1[jj])) u.add(proc.x1[jj], {grid.bin_mode(j), zero});
        if (!is_zero(proc.x2[jj])) u.add(proc.x2[jj], {zero, grid.bin_mode(j)});
    }
    return u;
}

AdaptednessWitness adaptedness_check(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc,
                                     double tol) {
    check_process(space, grid, proc);
    for (int j = 0; j < grid.n; ++j) {
        for (int i = j; i < grid.n; ++i) {
            const SparseOp a = space.lowering(i);
            const SparseOp c = space.raising(i);
            double r = 0.0;
            for (const auto* x : {&proc.x1[static_cast<std::size_t>(j)], &proc.x2[static_cast<std::size_t>(j)]}) {
                if (is_zero(*x)) continue;
                r = std::max(r, commutator_norm(a, *x));
                if (r <= tol) r = std::max(r, commutator_norm(c, *x));
            }
            if (r > tol) return {false, j, i, r};
        }
    }
    return {};
}

FockOp riemann_sum(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc) {
    check_process(space, grid, proc);
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (int j = 0; j < grid.n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const HVec e = grid.bin_mode(j);
        if (!is_zero(proc.x1[jj])) out += proc.x1[jj] * ladder_sparse(space, LadderKind::momentum, e);
        if (!is_zero(proc.x2[jj])) out += proc.x2[jj] * ladder_sparse(space, LadderKind::position, e);
    }
    return out;
}

HPIntegral hp_integral(const FockSpace& space, const TimeGrid& grid, const StepProcessPair& proc) {
    const AdaptednessWitness w = adaptedness_check(space, grid, proc);
    if (!w.adapted) {
        std::ostringstream msg;
        msg << "process is not adapted: bin " << w.bin << " does not commute with mode " << w.mode << " (residual "
            << w.residual << ")";
        throw NotAdaptedError(msg.str());
    }
    HPIntegral out;
    out.value = riemann_sum(space, grid, proc);
    for (int j = 0; j < grid.n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const HVec e = grid.bin_mode(j);
        const SparseOp dp = ladder_sparse(space, LadderKind::momentum, e);
        const SparseOp dq = ladder_sparse(space, LadderKind::position, e);
        for (const auto& [x, d] : {std::pair{&proc.x1[jj], &dp}, std::pair{&proc.x2[jj], &dq}}) {
            if (is_zero(*x)) continue;
            out.ordering_residual = std::max(out.ordering_residual, commutator_norm(*d, *x));
        }
    }
    return out;
}

BelavkinDecomposition belavkin_decomposition(const FockSpace& space, const StepProcessPair& proc) {
    if (proc.x1.size() != proc.x2.size()) throw DimensionMismatch("belavkin_decomposition: X1 and X2 bin counts differ");
    const FockOp z = FockOp::Zero(space.dim(), space.dim());
    BelavkinDecomposition out;
    for (std::size_t j = 0; j < proc.x1.size(); ++j) {
        const FockOp& x1 = is_zero(proc.x1[j]) ? z : proc.x1[j];
        const FockOp& x2 = is_zero(proc.x2[j]) ? z : proc.x2[j];
        out.creation.push_back(x2 - I_unit * x1);
        out.annihilation.push_back(x2 + I_unit * x1);
    }
    return out;
}

FockOp belavkin_operator(const FockSpace& space, const TimeGrid& grid, const BelavkinDecomposition& dec) {
    grid.validate();
    if (static_cast<int>(dec.creation.size()) != grid.n || static_cast<int>(dec.annihilation.size()) != grid.n)
        throw DimensionMismatch("belavkin_operator: one integrand pair per bin required");
    FockOp out = FockOp::Zero(space.dim(), space.dim());
    for (int j = 0; j < grid.n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const HVec e = grid.bin_mode(j);
        out += ladder_sparse(space, LadderKind::create, e) * dec.creation[jj];
        out += dec.annihilation[jj] * ladder_sparse(space, LadderKind::annihilate, e);
    }
    return out;
}

ProcessFile parse_process(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("process file must be a JSON object");
    ProcessFile out;
    try {
        out.grid.T = j.at("T").get<double>();
        out.grid.n = j.at("bins").get<int>();
        out.terms = j.value("terms", nlohmann::json::array());
        if (j.contains("adapted")) out.declared_adapted = j.at("adapted").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("process file: ") + e.what());
    }
    out.grid.validate();
    if (!out.terms.is_array()) throw ConfigError("process file: terms must be an array");
    for (const auto& t : out.terms) {
        if (!t.is_object() || !t.contains("bin")) throw ConfigError("process file: every term needs a bin");
        const int b = t.at("bin").get<int>();
        if (b < 0 || b >= out.grid.n) throw ConfigError("process file: bin index out of range");
    }
    return out;
}

FockOp matrix_from_spec(const FockSpace& space, const nlohmann::json& spec) {
    const Index d = space.dim();
    if (spec.is_string()) {
        const auto s = spec.get<std::string>();
        if (s == "identity") return FockOp::Identity(d, d);
        if (s == "zero") return FockOp::Zero(d, d);
        throw ConfigError("unknown matrix spec '" + s + "'");
    }
    if (spec.is_object()) {
        if (spec.contains("ladder")) {
            return ladder(space, parse_ladder(spec.at("ladder").get<std::string>()),
                          parse_hvec(spec.at("h"), space.modes(), "ladder h"));
        }
        if (spec.contains("h1") || spec.contains("h2")) {
            const HVec h1 = spec.contains("h1") ? parse_hvec(spec.at("h1"), space.modes(), "h1") : HVec(HVec::Zero(space.modes()));
            const HVec h2 = spec.contains("h2") ? parse_hvec(spec.at("h2"), space.modes(), "h2") : HVec(HVec::Zero(space.modes()));
            if (!DirectionPair{h1, h2}.is_real()) throw ConfigError("Weyl spec needs real h1 and h2");
            return weyl(space, h1, h2);
        }
        throw ConfigError("matrix spec object needs h1/h2 or ladder");
    }
    if (spec.is_array()) {
        if (static_cast<Index>(spec.size()) != d) throw ConfigError("explicit matrix has the wrong number of rows");
        FockOp m(d, d);
        for (Index r = 0; r < d; ++r) {
            const HVec row = parse_hvec(spec[static_cast<std::size_t>(r)], static_cast<int>(d), "matrix row");
            m.row(r) = row.transpose();
        }
        return m;
    }
    throw ConfigError("unsupported matrix spec");
}

StepProcessPair build_process(const FockSpace& space, const ProcessFile& file) {
    StepProcessPair p = zero_process(space, file.grid);
    if (space.modes() != file.grid.n) throw DimensionMismatch("process: space modes must equal the bin count");
    for (const auto& t : file.terms) {
        const auto b = static_cast<std::size_t>(t.at("bin").get<int>());
        if (t.contains("X1")) p.x1[b] += matrix_from_spec(space, t.at("X1"));
        if (t.contains("X2")) p.x2[b] += matrix_from_spec(space, t.at("X2"));
    }
    p.adapted = file.declared_adapted.value_or(false);
    return p;
}

std::vector<std::pair<std::string, nlohmann::json>> sample_process_corpus() {
    static const char* const raw[][2] = {
        {"adapted_constant", R"({
  "T": 1.0,
  "bins": 4,
  "adapted": true,
  "terms": [
    {"bin": 0, "X1": "identity"},
    {"bin": 1, "X1": "identity"},
    {"bin": 2, "X1": "identity"},
    {"bin": 3, "X1": "identity"}
  ]
})"},
        {"adapted_weyl", R"({
  "T": 1.0,
  "bins": 4,
  "adapted": true,
  "terms": [
    {"bin": 0, "X2": "identity"},
    {"bin": 1, "X1": {"h1": [0.4, 0.0, 0.0, 0.0], "h2": [0.0, 0.0, 0.0, 0.0]},
               "X2": {"h1": [0.0, 0.0, 0.0, 0.0], "h2": [0.3, 0.0, 0.0, 0.0]}},
    {"bin": 2, "X2": {"h1": [0.2, -0.3, 0.0, 0.0], "h2": [0.1, 0.4, 0.0, 0.0]}},
    {"bin": 3, "X1": {"h1": [0.1, 0.2, 0.3, 0.0], "h2": [0.3, 0.0, -0.2, 0.0]}}
  ]
})"},
        {"adapted_ladder", R"({
  "T": 2.0,
  "bins": 4,
  "adapted": true,
  "terms": [
    {"bin": 1, "X1": {"ladder": "position", "h": [1.0, 0.0, 0.0, 0.0]}},
    {"bin": 2, "X2": {"ladder": "momentum", "h": [0.5, 0.5, 0.0, 0.0]}},
    {"bin": 3, "X2": {"ladder": "create", "h": [0.0, 0.0, 1.0, 0.0]}}
  ]
})"},
        {"adapted_mixed", R"({
  "T": 1.0,
  "bins": 4,
  "adapted": true,
  "terms": [
    {"bin": 0, "X1": "identity", "X2": "identity"},
    {"bin": 1, "X2": {"h1": [-0.3, 0.0, 0.0, 0.0], "h2": [0.2, 0.0, 0.0, 0.0]}},
    {"bin": 2, "X1": {"ladder": "annihilate", "h": [0.0, [0.0, 1.0], 0.0, 0.0]}},
    {"bin": 2, "X1": "identity"},
    {"bin": 3, "X1": {"h1": [0.0, 0.0, 0.5, 0.0], "h2": [0.0, 0.0, 0.0, 0.0]}, "X2": "zero"}
  ]
})"},
        {"adapted_single_bin", R"({
  "T": 0.5,
  "bins": 4,
  "adapted": true,
  "terms": [
    {"bin": 2, "X1": {"h1": [0.3, -0.2, 0.0, 0.0], "h2": [0.1, 0.25, 0.0, 0.0]}}
  ]
})"},
        {"nonadapted_own_bin", R"({
  "T": 1.0,
  "bins": 4,
  "terms": [
    {"bin": 0, "X1": "identity"},
    {"bin": 1, "X1": "identity"},
    {"bin": 2, "X1": {"ladder": "position", "h": [0.0, 0.0, 1.0, 0.0]}},
    {"bin": 3, "X1": "identity"}
  ]
})"},
    };
    std::vector<std::pair<std::string, nlohmann::json>> out;
    for (const auto& [name, text] : raw) out.emplace_back(name, nlohmann::json::parse(text));
    return out;
}

}  // namespace qmall
