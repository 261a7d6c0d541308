#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "irskg/config_io.hpp"
#include "irskg/errors.hpp"

using namespace irskg;

namespace {

ScenarioConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST_CASE("empty input yields the defaults") {
    CHECK(parse("") == ScenarioConfig{});
    CHECK(parse("# only a comment\n\n   \n") == ScenarioConfig{});
}

TEST_CASE("keys, whitespace and comments") {
    const ScenarioConfig c = parse(
        "  bs_pos = 1, 2.5 ,3\n"
        "# ignored = 4\n"
        "bs_antennas=8\n"
        "tx_power_dbm = 30\n"
        "phi_bs = 0.25\n"
        "solver.method = projected\n"
        "seed = 18446744073709551615\n");
    CHECK(c.bs_pos == Vec3{1.0, 2.5, 3.0});
    CHECK(c.bs_antennas == 8);
    CHECK(c.tx_power_dbm == 30.0);
    REQUIRE(c.angles.phi_bs.has_value());
    CHECK(*c.angles.phi_bs == 0.25);
    CHECK(c.solver.method == SubproblemMethod::kProjected);
    CHECK(c.seed == 18446744073709551615ULL);
}

TEST_CASE("irs_elements sets the grid shape") {
    const ScenarioConfig c = parse("irs_elements = 32\n");
    CHECK(c.irs_rows == 4);
    CHECK(c.irs_cols == 8);
}

TEST_CASE("auto clears an angle override") {
    ScenarioConfig c;
    apply_override(c, "theta_irs=1.0");
    CHECK(c.angles.theta_irs.has_value());
    apply_override(c, "theta_irs=auto");
    CHECK_FALSE(c.angles.theta_irs.has_value());
}

TEST_CASE("unknown keys and malformed values are errors") {
    CHECK_THROWS_AS(parse("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("bs_antennas = four\n"), ConfigError);
    CHECK_THROWS_AS(parse("bs_antennas = 4.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("bs_pos = 1,2\n"), ConfigError);
    CHECK_THROWS_AS(parse("bs_pos = 1,2,3,4\n"), ConfigError);
    CHECK_THROWS_AS(parse("tx_power_dbm = nan\n"), ConfigError);
    CHECK_THROWS_AS(parse("tx_power_dbm =\n"), ConfigError);
    CHECK_THROWS_AS(parse("solver.method = interior-point\n"), ConfigError);
    CHECK_THROWS_AS(parse("just a line\n"), ConfigError);
    ScenarioConfig c;
    CHECK_THROWS_AS(apply_override(c, "seed"), ConfigError);
}

TEST_CASE("errors carry the source line") {
    try {
        std::istringstream in("seed = 1\nbogus = 2\n");
        parse_config(in, "cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
    }
}

TEST_CASE("serialization round-trips") {
    ScenarioConfig c;
    c.ut_pos = {0.1, 1.0 / 3.0, -7e-5};
    c.c_ab = 2.718281828459045;
    c.bs_antennas = 6;
    c.angles.omega_irs_eve = 0.123456789012345678;
    c.solver.method = SubproblemMethod::kProjected;
    c.solver.randomization_trials = 77;
    c.seed = 987654321987654321ULL;
    CHECK(parse(serialize_config(c)) == c);
    CHECK(parse(serialize_config(ScenarioConfig{})) == ScenarioConfig{});
}

TEST_CASE("config hash tracks every field") {
    const ScenarioConfig base;
    ScenarioConfig changed = base;
    CHECK(config_hash(changed) == config_hash(base));
    changed.noise2_dbm = -81.0;
    CHECK(config_hash(changed) != config_hash(base));
    changed = base;
    changed.solver.outer_tol = 2e-6;
    CHECK(config_hash(changed) != config_hash(base));
    CHECK(config_hash_hex(base).size() == 16);
}

TEST_CASE("every documented key is accepted by --set") {
    const auto keys = config_keys();
    CHECK(std::find(keys.begin(), keys.end(), "irs_elements") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "solver.method") != keys.end());
    for (const std::string& k : keys) {
        ScenarioConfig c;
        std::string value = "1";
        if (k.find("_pos") != std::string::npos) {
            value = "1,2,3";
        } else if (k == "solver.method") {
            value = "factored";
        }
        CHECK_NOTHROW(apply_setting(c, k, value));
    }
}

TEST_CASE("load_config reads files and reports missing ones") {
    CHECK_THROWS_AS(load_config("/nonexistent/irskg.cfg"), ConfigError);
    const std::string path = "irskg_test_config.cfg";
    {
        std::ofstream out(path);
        out << "bs_antennas = 2\nirs_elements = 9\n";
    }
    const ScenarioConfig c = load_config(path);
    CHECK(c.bs_antennas == 2);
    CHECK(c.irs_rows == 3);
    CHECK(c.irs_cols == 3);
    std::remove(path.c_str());
}
