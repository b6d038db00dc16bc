#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmall/weyl_calculus.hpp"
#include "qmall/wigner.hpp"

namespace qmall {

struct Config {
    int modes = 2;
    int cutoff = 12;
    double tolerance = 1e-10;
    double weyl_tolerance = 1e-6;
    QuadratureSpec quadrature;
    GridSpec grid;
    std::uint64_t seed = 1;
    std::size_t dimension_limit = default_dimension_limit;
    void validate() const;
};

// Flat keys: modes, cutoff, tolerance, weyl_tolerance, quadrature_half_width, quadrature_nodes,
// grid_half_width, grid_nodes, seed, dimension_limit. Unknown keys are rejected.
Config config_from_json(const nlohmann::json& j, Config base = {});
nlohmann::ordered_json config_to_json(const Config& c);
const std::vector<std::string>& config_keys();

// Which config tolerance a check scales with.
enum class ToleranceClass { exact, truncated };

struct CheckResult {
    std::string check_id;
    std::string paper_ref;  // the identity being checked
    std::string measure;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string error;  // set when the check threw
    double runtime_ms = 0.0;
};

struct ResidualReport {
    Config config;
    std::vector<CheckResult> checks;
    int passed() const;
    int failed() const { return static_cast<int>(checks.size()) - passed(); }
    bool all_pass() const { return failed() == 0; }
    nlohmann::ordered_json to_json(bool timings = false) const;
};

struct SuiteSpaces {
    int core_modes;
    int core_cutoff;
    int single_cutoff;
    int quant_cutoff;
    int wigner_cutoff;
    int bridge_cutoff;  // per mode, 2 modes
};

// N = ⌈0.625·L²(‖h1‖²+‖h2‖²)⌉ keeps χ accurate out to the grid corners.
int wigner_cutoff(const DirectionPair& h, const GridSpec& grid);
SuiteSpaces suite_spaces(const Config& c);
// Throws DimensionLimitError naming the first space over the limit.
void check_dimensions(const Config& c);

// Base tolerances are multiplied by tolerance/1e-10 (exact) or weyl_tolerance/1e-6 (truncated).
double scaled_tolerance(const Config& c, ToleranceClass cls, double base);

// filter: comma-separated check-id prefixes; empty runs everything.
ResidualReport run_checks(const Config& c, const std::string& filter = "");
std::vector<std::string> check_ids();

}  // namespace qmall
