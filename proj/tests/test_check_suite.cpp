#include <doctest.h>

#include <set>

#include "qmall/check_suite.hpp"

using namespace qmall;

namespace {

const ResidualReport& default_report() {
    static const ResidualReport r = run_checks(Config{});
    return r;
}

const char* const kQuick = "fock,ccr,weyl,divergence,malliavin";

}  // namespace

TEST_CASE("config parsing") {
    const Config d = config_from_json(nlohmann::json::object());
    CHECK(d.modes == 2);
    CHECK(d.cutoff == 12);
    CHECK(d.tolerance == 1e-10);
    CHECK(d.weyl_tolerance == 1e-6);
    CHECK(d.quadrature.nodes == 129);
    CHECK(d.grid.nodes == 129);
    const Config c = config_from_json({{"modes", 3}, {"cutoff", 6}, {"tolerance", 0.0}, {"grid_nodes", 65}, {"seed", 9}});
    CHECK(c.modes == 3);
    CHECK(c.cutoff == 6);
    CHECK(c.tolerance == 0.0);
    CHECK(c.grid.nodes == 65);
    CHECK(c.seed == 9);
    CHECK(config_from_json(config_to_json(c)).cutoff == 6);
    CHECK(config_to_json(c).size() == config_keys().size());

    CHECK_THROWS_AS(config_from_json({{"mode", 2}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"modes", "two"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"modes", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"cutoff", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"quadrature_nodes", 64}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"grid_nodes", 2}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"tolerance", -1.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("space sizes and the dimension limit") {
    const DirectionPair e{HVec::Ones(1), HVec::Ones(1)};
    CHECK(wigner_cutoff(e, GridSpec{}) == 80);
    CHECK(wigner_cutoff(e, GridSpec{4.0, 129}) == 20);
    const SuiteSpaces s = suite_spaces(Config{});
    CHECK(s.quant_cutoff == 16);
    CHECK(s.bridge_cutoff == 24);
    CHECK_NOTHROW(check_dimensions(Config{}));
    Config small;
    small.dimension_limit = 100;
    CHECK_THROWS_AS(check_dimensions(small), DimensionLimitError);
    CHECK_THROWS_AS(run_checks(small), DimensionLimitError);
}

TEST_CASE("tolerance scaling") {
    Config c;
    CHECK(scaled_tolerance(c, ToleranceClass::exact, 1e-12) == doctest::Approx(1e-12));
    CHECK(scaled_tolerance(c, ToleranceClass::truncated, 1e-8) == doctest::Approx(1e-8));
    c.tolerance = 1e-8;
    c.weyl_tolerance = 0.0;
    CHECK(scaled_tolerance(c, ToleranceClass::exact, 1e-12) == doctest::Approx(1e-10));
    CHECK(scaled_tolerance(c, ToleranceClass::truncated, 1e-8) == 0.0);
}

TEST_CASE("default configuration passes every check") {
    const ResidualReport& r = default_report();
    CHECK(r.checks.size() == check_ids().size());
    CHECK(r.all_pass());
    std::set<std::string> ids;
    for (const auto& c : r.checks) {
        CAPTURE(c.check_id);
        CHECK(c.pass);
        CHECK(c.pass == (c.residual <= c.tolerance));
        CHECK_FALSE(c.paper_ref.empty());
        CHECK_FALSE(c.measure.empty());
        CHECK(c.error.empty());
        ids.insert(c.check_id);
    }
    CHECK(ids.size() == r.checks.size());
}

TEST_CASE("report layout") {
    const ResidualReport& r = default_report();
    const auto j = r.to_json();
    CHECK(j.at("summary").at("total") == r.checks.size());
    CHECK(j.at("summary").at("failed") == 0);
    CHECK(j.at("config").at("cutoff") == 12);
    const auto& first = j.at("checks").at(0);
    CHECK_FALSE(first.contains("runtime_ms"));
    std::vector<std::string> keys;
    for (const auto& [k, v] : first.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"check_id", "paper_ref", "measure", "residual", "tolerance", "pass"});
    CHECK(r.to_json(true).at("checks").at(0).contains("runtime_ms"));
    CHECK(r.to_json().dump() == r.to_json().dump());
}

TEST_CASE("zero tolerance fails every check with a nonzero residual") {
    Config c;
    c.tolerance = 0.0;
    c.weyl_tolerance = 0.0;
    const ResidualReport r = run_checks(c, kQuick);
    CHECK(r.failed() > 0);
    for (const auto& chk : r.checks) {
        CAPTURE(chk.check_id);
        CHECK(chk.tolerance == 0.0);
        CHECK(chk.pass == (chk.residual == 0.0));
    }
}

TEST_CASE("seed changes residuals but not the verdicts") {
    Config c;
    c.seed = 12345;
    const ResidualReport a = run_checks(Config{}, kQuick);
    const ResidualReport b = run_checks(c, kQuick);
    REQUIRE(a.checks.size() == b.checks.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].check_id == b.checks[i].check_id);
        CHECK(a.checks[i].pass == b.checks[i].pass);
        differs = differs || a.checks[i].residual != b.checks[i].residual;
    }
    CHECK(differs);
}

TEST_CASE("filter selects by prefix") {
    const ResidualReport r = run_checks(Config{}, "ccr.,weyl.adjoint");
    REQUIRE(r.checks.size() == 5);
    CHECK(r.checks.back().check_id == "weyl.adjoint");
}
