#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmall/check_suite.hpp"
#include "qmall/residual.hpp"
#include "qmall/white_noise.hpp"
#include "qmall/wigner.hpp"

namespace fs = std::filesystem;
using namespace qmall;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, resource = 3 };

// One string option per config key; kebab-case on the command line.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "config file (default: $QMALL_CONFIG)");
        for (const auto& key : config_keys()) {
            std::string flag = key;
            for (char& ch : flag)
                if (ch == '_') ch = '-';
            app->add_option("--" + flag, values[key], "overrides config key " + key);
        }
    }

    Config resolve(const CLI::App* app) const {
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv("QMALL_CONFIG")) path = env;
        }
        nlohmann::json j = nlohmann::json::object();
        if (!path.empty()) {
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot read config file " + path);
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError("config file " + path + ": " + e.what());
            }
            if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
        }
        for (const auto& [key, text] : values) {
            std::string flag = key;
            for (char& ch : flag)
                if (ch == '_') ch = '-';
            if (app->count("--" + flag) == 0) continue;
            try {
                j[key] = nlohmann::json::parse(text);
            } catch (const nlohmann::json::parse_error&) {
                throw ConfigError("--" + flag + ": '" + text + "' is not a number");
            }
        }
        return config_from_json(j);
    }
};

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_atomic(path, content);
    }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

HVec to_hvec(const std::vector<double>& v) {
    HVec h(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) h(static_cast<Index>(i)) = v[i];
    return h;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

// ---- check

struct CheckArgs {
    std::string out;
    std::string only;
    bool timings = false;
};

int cmd_check(const Config& cfg, const CheckArgs& a) {
    const ResidualReport r = run_checks(cfg, a.only);
    emit(a.out, dump(r.to_json(a.timings)));
    for (const auto& c : r.checks)
        if (!c.pass) std::cerr << "FAIL " << c.check_id << ": residual " << c.residual << " > " << c.tolerance << "\n";
    std::cerr << r.passed() << "/" << r.checks.size() << " checks passed\n";
    return r.all_pass() ? ok : failure;
}

// ---- wigner

struct WignerArgs {
    std::string state = "vacuum";
    std::string state_file;
    std::string lambdas = "1";
    double t = 1.0;
    std::string h1;
    std::string h2;
    int wigner_cutoff = 0;
    std::string out;
    bool characteristic = false;
};

State build_state(const FockSpace& s, const WignerArgs& a) {
    if (a.state == "vacuum") return State::vacuum(s);
    if (a.state == "gaussian") {
        const std::vector<double> l = parse_list(a.lambdas, "--lambdas");
        if (static_cast<int>(l.size()) != s.modes()) throw ConfigError("--lambdas needs one value per entry of --h1");
        const auto sq = second_quantization(s, GaussianSpec{l, a.t});
        return State::density(sq.rho / sq.z_truncated);
    }
    if (a.state == "vector") {
        std::ifstream in(a.state_file);
        if (!in) throw ConfigError("cannot read state file '" + a.state_file + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("state file: ") + e.what());
        }
        return state_from_json(s, j);
    }
    throw ConfigError("--state must be vacuum, gaussian or vector");
}

int cmd_wigner(Config cfg, const WignerArgs& a) {
    if (a.out.empty()) throw ConfigError("wigner needs --out");
    // mode count: --h1, else --lambdas for a Gaussian state, else one mode
    int modes = 1;
    if (!a.h1.empty()) {
        modes = static_cast<int>(parse_list(a.h1, "--h1").size());
    } else if (a.state == "gaussian") {
        modes = static_cast<int>(parse_list(a.lambdas, "--lambdas").size());
    }
    cfg.modes = modes;
    const HVec h1 = a.h1.empty() ? basis_vector(modes, 0) : to_hvec(parse_list(a.h1, "--h1"));
    const HVec h2 = a.h2.empty() ? basis_vector(modes, 0) : to_hvec(parse_list(a.h2, "--h2"));
    if (h2.size() != modes) throw ConfigError("--h1 and --h2 need the same number of entries");
    const DirectionPair h{h1, h2};
    const int needed = wigner_cutoff(h, cfg.grid);
    const int cutoff = a.wigner_cutoff > 0 ? a.wigner_cutoff : std::max(cfg.cutoff, needed);
    if (cutoff < needed)
        std::cerr << "warning: cutoff " << cutoff << " is below " << needed
                  << " for this grid; the characteristic function is inaccurate near the grid corners\n";
    const std::size_t dim = predicted_dimension(cfg.modes, cutoff, Truncation::total);
    if (dim > cfg.dimension_limit) {
        std::ostringstream msg;
        msg << "wigner space has dimension " << dim << ", above the limit " << cfg.dimension_limit;
        throw DimensionLimitError(msg.str());
    }
    const FockSpace s(cfg.modes, cutoff, Truncation::total, cfg.dimension_limit);
    const State st = build_state(s, a);
    const cplx pairing = inner_h(h1, h2);
    if (std::abs(pairing) == 0.0) std::cerr << "warning: <h1, h2> = 0, the pair is degenerate\n";

    const DensityGrid chi = characteristic_function(s, st, h, cfg.grid);
    const DensityGrid w = wigner_from_characteristic(chi);
    std::ostringstream csv;
    write_csv(csv, a.characteristic ? chi : w);
    write_atomic(a.out, csv.str());

    ojson side;
    side["normalization"] = normalization(w);
    side["min_value"] = min_value(w);
    side["max_value"] = max_value(w);
    side["negativity_flag"] = negativity_flag(w);
    side["h1_h2_pairing"] = {pairing.real(), pairing.imag()};
    side["degenerate_pair"] = std::abs(pairing) == 0.0;
    side["cutoff"] = cutoff;
    side["recommended_cutoff"] = needed;
    side["grid_nodes"] = w.n;
    side["density_step"] = w.step;
    write_atomic(a.out + ".json", dump(side));
    return ok;
}

// ---- gaussian

struct GaussianArgs {
    std::string lambdas = "1";
    double t = 1.0;
    std::string out;
};

int cmd_gaussian(const Config& cfg, const GaussianArgs& a) {
    const GaussianSpec spec{parse_list(a.lambdas, "--lambdas"), a.t};
    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const int modes = static_cast<int>(spec.lambdas.size());
    const FockSpace s(modes, cfg.cutoff, Truncation::total, cfg.dimension_limit);
    const auto sq = second_quantization(s, spec);
    const double tol = scaled_tolerance(cfg, ToleranceClass::truncated, 1e-6);

    ojson out;
    out["lambdas"] = spec.lambdas;
    out["t"] = spec.t;
    out["cutoff"] = cfg.cutoff;
    out["z_truncated"] = sq.z_truncated;
    out["z_exact"] = sq.z_exact;
    out["tail_gap"] = sq.tail_gap;
    out["tail_bound"] = sq.tail_bound;
    // the gap is a difference of two O(Z) numbers
    const bool within = sq.tail_gap <= sq.tail_bound + 1e-15 * sq.z_exact;
    out["within_tail_bound"] = within;

    const FockOp rho = sq.rho / sq.z_truncated;
    const HVec e = HVec::Ones(modes) / std::sqrt(static_cast<double>(modes));
    double worst = 0.0;
    ojson points = ojson::array();
    for (double u : {-1.0, 0.0, 1.0})
        for (double v : {-1.0, 0.0, 1.0}) {
            const cplx chi = (rho * weyl(s, HVec(u * e), HVec(v * e))).trace();
            const cplx closed = thermal_characteristic(spec, e, e, u, v);
            worst = std::max(worst, std::abs(chi - closed));
            points.push_back({{"u", u}, {"v", v}, {"trace", chi.real()}, {"closed_form", closed.real()}});
        }
    out["characteristic"] = {{"points", points}, {"residual", worst}, {"tolerance", tol}, {"pass", worst <= tol}};
    emit(a.out, dump(out));
    return within && worst <= tol ? ok : failure;
}

// ---- skorohod

struct SkorohodArgs {
    std::string process;
    std::string out;
    std::string dump_matrix;
    int process_cutoff = 0;
};

int pick_process_cutoff(int bins, std::size_t limit) {
    for (int n = 5; n >= 1; --n)
        if (predicted_dimension(bins, n, Truncation::per_mode) <= limit) return n;
    std::ostringstream msg;
    msg << "no cutoff keeps " << bins << " bins within the dimension limit " << limit;
    throw DimensionLimitError(msg.str());
}

void write_matrix_csv(const std::string& path, const FockOp& m) {
    std::ostringstream os;
    os << "row,col,re,im\n";
    char buf[128];
    for (Index c = 0; c < m.cols(); ++c)
        for (Index r = 0; r < m.rows(); ++r) {
            if (m(r, c) == cplx(0.0)) continue;
            std::snprintf(buf, sizeof buf, "%ld,%ld,%.16e,%.16e\n", static_cast<long>(r), static_cast<long>(c),
                          m(r, c).real(), m(r, c).imag());
            os << buf;
        }
    write_atomic(path, os.str());
}

int cmd_skorohod(const Config& cfg, const SkorohodArgs& a) {
    std::ifstream in(a.process);
    if (!in) throw ConfigError("cannot read process file '" + a.process + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("process file: ") + e.what());
    }
    const ProcessFile file = parse_process(j);
    const int cutoff = a.process_cutoff > 0 ? a.process_cutoff : pick_process_cutoff(file.grid.n, cfg.dimension_limit);
    const FockSpace s(file.grid.n, cutoff, Truncation::per_mode, cfg.dimension_limit);
    StepProcessPair p;
    try {
        p = build_process(s, file);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("process file: ") + e.what());
    }
    const ElementaryField u = process_to_field(s, file.grid, p);
    const FockOp delta = divergence_def(s, u);
    const AdaptednessWitness w = adaptedness_check(s, file.grid, p);

    ojson out;
    out["process"] = fs::path(a.process).filename().string();
    out["T"] = file.grid.T;
    out["bins"] = file.grid.n;
    out["cutoff"] = cutoff;
    out["truncation"] = "per_mode";
    out["adapted"] = w.adapted;
    if (file.declared_adapted) out["declared_adapted"] = *file.declared_adapted;
    if (w.adapted) {
        out["witness"] = nullptr;
    } else {
        out["witness"] = {{"bin", w.bin}, {"mode", w.mode}, {"residual", w.residual}};
    }
    bool pass = !file.declared_adapted || *file.declared_adapted == w.adapted;

    if (w.adapted) {
        const HPIntegral hp = hp_integral(s, file.grid, p);
        const double r = (delta - hp.value).norm();
        const double tol = scaled_tolerance(cfg, ToleranceClass::exact, 1e-9);
        out["skorohod_hp"] = {{"residual", r},
                              {"tolerance", tol},
                              {"pass", r <= tol},
                              {"ordering_residual", hp.ordering_residual}};
        pass = pass && r <= tol;
    } else {
        out["skorohod_hp"] = "not-applicable";
    }

    const FockOp bel = belavkin_operator(s, file.grid, belavkin_decomposition(s, p));
    Rng rng(cfg.seed);
    double gap = 0.0;
    for (int t = 0; t < 20; ++t) {
        const FockVec e1 = exponential_vector(s, rng.complex_ball(s.modes(), 0.5));
        const FockVec e2 = exponential_vector(s, rng.complex_ball(s.modes(), 0.5));
        gap = std::max(gap, std::abs(e1.dot((bel - delta) * e2)));
    }
    const double btol = scaled_tolerance(cfg, ToleranceClass::truncated, 1e-8);
    out["belavkin"] = {{"residual", gap}, {"tolerance", btol}, {"pass", gap <= btol}};
    pass = pass && gap <= btol;
    out["delta_norm"] = delta.norm();
    out["pass"] = pass;

    if (!a.dump_matrix.empty()) write_matrix_csv(a.dump_matrix, delta);
    emit(a.out, dump(out));
    return pass ? ok : failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Malliavin calculus on truncated Fock spaces"};
    app.require_subcommand(1);

    ConfigFlags check_flags;
    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "run the identity suite and write a residual report");
    check_flags.attach(check);
    check->add_option("--out", check_args.out, "report path (default stdout)");
    check->add_option("--only", check_args.only, "comma-separated check-id prefixes");
    check->add_flag("--timings", check_args.timings, "include runtime_ms per check");

    ConfigFlags wigner_flags;
    WignerArgs wigner_args;
    CLI::App* wig = app.add_subcommand("wigner", "Wigner density of (P(h1), Q(h2)) as CSV plus a JSON sidecar");
    wigner_flags.attach(wig);
    wig->add_option("--state", wigner_args.state, "vacuum | gaussian | vector");
    wig->add_option("--state-file", wigner_args.state_file, "JSON state for --state vector");
    wig->add_option("--lambdas", wigner_args.lambdas, "comma-separated eigenvalues for --state gaussian");
    wig->add_option("--t", wigner_args.t, "semigroup time for --state gaussian");
    wig->add_option("--h1", wigner_args.h1, "comma-separated real coefficients (default e1)");
    wig->add_option("--h2", wigner_args.h2, "comma-separated real coefficients (default e1)");
    wig->add_option("--wigner-cutoff", wigner_args.wigner_cutoff, "cutoff for this space (default: large enough)");
    wig->add_option("--out", wigner_args.out, "CSV path; the sidecar is written to <out>.json")->required();
    wig->add_flag("--characteristic", wigner_args.characteristic, "write the characteristic function instead");

    ConfigFlags gaussian_flags;
    GaussianArgs gaussian_args;
    CLI::App* gau = app.add_subcommand("gaussian", "thermal state partition function and characteristic function");
    gaussian_flags.attach(gau);
    gau->add_option("--lambdas", gaussian_args.lambdas, "comma-separated eigenvalues, one per mode");
    gau->add_option("--t", gaussian_args.t, "semigroup time");
    gau->add_option("--out", gaussian_args.out, "report path (default stdout)");

    ConfigFlags skorohod_flags;
    SkorohodArgs skorohod_args;
    CLI::App* sko = app.add_subcommand("skorohod", "compare the Skorohod and Hudson-Parthasarathy integrals");
    skorohod_flags.attach(sko);
    sko->add_option("--process", skorohod_args.process, "process JSON file")->required();
    sko->add_option("--out", skorohod_args.out, "report path (default stdout)");
    sko->add_option("--dump-matrix", skorohod_args.dump_matrix, "write the nonzero entries of delta(u) as CSV");
    sko->add_option("--process-cutoff", skorohod_args.process_cutoff, "per-mode cutoff (default: at most 5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (check->parsed()) return cmd_check(check_flags.resolve(check), check_args);
        if (wig->parsed()) return cmd_wigner(wigner_flags.resolve(wig), wigner_args);
        if (gau->parsed()) return cmd_gaussian(gaussian_flags.resolve(gau), gaussian_args);
        if (sko->parsed()) return cmd_skorohod(skorohod_flags.resolve(sko), skorohod_args);
    } catch (const DimensionLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return resource;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
