#include "omitlab/errors.hpp"
#include "omitlab/figures.hpp"
#include "omitlab/omit_response.hpp"
#include "omitlab/optical_response.hpp"
#include "omitlab/sweep.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

using namespace omitlab;

namespace {

constexpr double kGc = 6.43e6;

SweepSpec tip_sweep(Observable obs, int count = 161) {
    SweepSpec s;
    s.observable = obs;
    s.axis1 = {"gamma_tip", 0.0, 8.0 * kGc, count, {}};
    s.base = default_config();
    return s;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("optical sweep over tip loss has its minimum at 3 gamma_c") {
    const auto r = run_sweep(tip_sweep(Observable::optical_T));
    REQUIRE(r.grids.size() == 1);
    REQUIRE(r.grids[0].size() == 161);
    std::size_t best = 0;
    for (std::size_t k = 1; k < 161; ++k) {
        if (r.grids[0][k] < r.grids[0][best]) {
            best = k;
        }
    }
    CHECK(r.axis1_values[best] == doctest::Approx(3.0 * kGc).epsilon(1e-12));
    CHECK(r.errors.empty());
}

TEST_CASE("two-dimensional sweep shape and pointwise agreement") {
    auto s = tip_sweep(Observable::T_P, 9);
    s.axis2 = SweepAxis{"Delta_P", -15e6, 15e6, 7, {}};
    const auto r = run_sweep(s, 3);
    REQUIRE(r.grids[0].size() == 9 * 7);
    for (std::size_t i1 = 0; i1 < 9; ++i1) {
        for (std::size_t i2 = 0; i2 < 7; ++i2) {
            auto cfg = default_config();
            cfg.gamma_tip = r.axis1_values[i1];
            CHECK(r.at(0, i1, i2) == probe_transmission(cfg, r.axis2_values[i2]).T_P);
        }
    }
}

TEST_CASE("two-point sweep equals pointwise calls") {
    SweepSpec s;
    s.observable = Observable::optical_T;
    s.axis1 = {"Delta_P", -1e6, 1e6, 2, {}};
    s.base = default_config();
    const auto r = run_sweep(s);
    REQUIRE(r.grids[0].size() == 2);
    CHECK(r.grids[0][0] == optical_transmission(s.base, -1e6, -1e6).T);
    CHECK(r.grids[0][1] == optical_transmission(s.base, 1e6, 1e6).T);
}

TEST_CASE("eigen sweeps carry two tracked grids") {
    const auto r = run_sweep(tip_sweep(Observable::eig_real));
    REQUIRE(r.grid_names.size() == 2);
    CHECK(r.grid_names[0] == "plus");
    CHECK(r.grid_names[1] == "minus");
    CHECK(r.grids[0][0] == doctest::Approx(2.0 * kGc));
    CHECK(r.grids[1][0] == doctest::Approx(-2.0 * kGc));
    CHECK(std::abs(r.grids[0][160]) <= 1e-6);
    const auto csv = emit_csv(r);
    CHECK(csv.rfind("axis1,value_plus,value_minus\n", 0) == 0);
}

TEST_CASE("invalid specs") {
    auto s = tip_sweep(Observable::T_P);
    s.axis1.count = 1;
    CHECK_THROWS_AS(run_sweep(s), InvalidSpec);
    s = tip_sweep(Observable::T_P);
    s.axis1.start = s.axis1.stop;
    CHECK_THROWS_AS(run_sweep(s), InvalidSpec);
    s = tip_sweep(Observable::T_P);
    s.axis1.parameter = "gamma_3";
    CHECK_THROWS_AS(run_sweep(s), InvalidSpec);
    s = tip_sweep(Observable::T_P);
    s.axis2 = SweepAxis{"gamma_tip", 0.0, 1.0, 2, {}};
    CHECK_THROWS_AS(run_sweep(s), InvalidSpec);
    s = tip_sweep(Observable::T_P);
    s.axis1.explicit_values = {1.0, 1.0};
    CHECK_THROWS_AS(run_sweep(s), InvalidSpec);
    CHECK_THROWS_AS(observable_from_string("T"), InvalidSpec);
    CHECK_THROWS_AS(format_from_string("xml"), InvalidSpec);
}

TEST_CASE("cell failures become NaN with an error entry") {
    SweepSpec s;
    s.observable = Observable::T_P;
    s.axis1 = {"J", -1e6, 1e6, 3, {}}; // J <= 0 fails validation in the first two cells
    s.base = default_config();
    const auto r = run_sweep(s);
    CHECK(std::isnan(r.grids[0][0]));
    CHECK(std::isnan(r.grids[0][1]));
    CHECK(std::isfinite(r.grids[0][2]));
    REQUIRE(r.errors.size() == 2);
    CHECK(r.errors[0].i1 == 0);
    CHECK(r.errors[1].i1 == 1);
    CHECK(r.errors[0].message.find("J") != std::string::npos);
    const auto csv = emit_csv(r);
    CHECK(csv.find(",nan\n") != std::string::npos);
    const auto table = emit_error_table(r);
    CHECK(lines(table) == 3);
}

TEST_CASE("CSV layout") {
    SweepSpec s;
    s.observable = Observable::T_P;
    s.axis1 = {"Delta_P", -1e6, 1e6, 3, {}};
    s.base = default_config();
    const auto csv = emit_csv(run_sweep(s));
    CHECK(lines(csv) == 4);
    CHECK(csv.rfind("axis1,value\n-1000000,", 0) == 0);

    s.axis2 = SweepAxis{"gamma_tip", {}, {}, 0, {0.0, 1e6}};
    const auto csv2 = emit_csv(run_sweep(s));
    CHECK(lines(csv2) == 7);
    std::istringstream in(csv2);
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    CHECK(header == "axis1,axis2,value");
    CHECK(first.rfind("-1000000,0,", 0) == 0);
    CHECK(second.rfind("-1000000,1000000,", 0) == 0);
    // at least 12 significant digits
    const auto value = first.substr(first.rfind(',') + 1);
    CHECK(value.size() >= 14);
}

TEST_CASE("JSON round trip") {
    auto s = tip_sweep(Observable::tau_g, 11);
    s.name = "delay";
    s.axis2 = SweepAxis{"Delta_P", {}, {}, 0, {-3e6, 0.0, 4.5e6}};
    s.base.P_in = 3e-9;
    s.base.carrier = CarrierConvention::two_pi;
    s.Delta_P = 1.0;
    auto r = run_sweep(s, 2);
    r.errors.push_back({1, 2, "synthetic, \"quoted\""});
    r.grids[0][5] = std::nan("");
    const auto back = parse_result_json(emit_json(r));
    CHECK(identical(back, r));
    CHECK(emit_json(back) == emit_json(r));
    CHECK(emit_csv(back) == emit_csv(r));
    CHECK_THROWS_AS(parse_result_json("{"), InvalidSpec);
}

TEST_CASE("spec and config JSON") {
    const auto s = tip_sweep(Observable::eta, 5);
    const auto back = spec_from_json(spec_to_json(s));
    CHECK(back.base == s.base);
    CHECK(spec_to_json(back) == spec_to_json(s));
    CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"observable":"eta"})")), InvalidSpec);
    CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(
                        R"({"observable":"eta","axis1":{"parameter":"gamma_tip","start":0,"stop":1,"count":3},"extra":1})")),
                    InvalidSpec);
    CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(
                        R"({"observable":"eta","axis1":{"parameter":"gamma_tip","start":0,"stop":1,"count":3},"config":{"J":-1}})")),
                    InvalidSpec);
    const auto cfg = config_from_json(nlohmann::json::parse(R"({"gamma_tip": 19290000, "carrier": "two_pi"})"));
    CHECK(cfg.gamma_tip == 19.29e6);
    CHECK(cfg.carrier == CarrierConvention::two_pi);
    CHECK(config_hash(cfg) != config_hash(default_config()));
    CHECK(config_hash(cfg).size() == 16);
}

TEST_CASE("determinism across runs and schedules") {
    auto s = tip_sweep(Observable::T_P, 41);
    s.axis2 = SweepAxis{"Delta_P", -15e6, 15e6, 31, {}};
    const auto serial = run_sweep(s, 1);
    const auto again = run_sweep(s, 1);
    const auto parallel = run_sweep(s, 8);
    CHECK(emit_csv(serial) == emit_csv(again));
    CHECK(emit_csv(serial) == emit_csv(parallel));
    auto stripped = parallel;
    stripped.provenance.timestamp = serial.provenance.timestamp;
    CHECK(identical(serial, stripped));
    CHECK(serial.provenance.config_hash == config_hash(s.base));
    CHECK_FALSE(serial.provenance.code_version.empty());
}

TEST_CASE("bundled figure recipes load and run") {
    const auto ids = list_recipes(default_figures_dir());
    const char* expected[] = {"fig2a", "fig2b", "fig2cd", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e",
                              "fig3f", "fig4a", "fig4b", "fig5a", "fig5b", "fig5c", "fig5d"};
    for (const char* id : expected) {
        CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
        const auto recipe = find_recipe(default_figures_dir(), id);
        CHECK(recipe.id == id);
        CHECK_FALSE(recipe.sweeps.empty());
    }
    CHECK_THROWS_AS(find_recipe(default_figures_dir(), "fig9"), InvalidSpec);

    const auto fig3f = find_recipe(default_figures_dir(), "fig3f");
    REQUIRE(fig3f.sweeps.size() == 1);
    CHECK(fig3f.sweeps[0].observable == Observable::T_P);
    CHECK(fig3f.sweeps[0].axis1.parameter == "gamma_tip");
    REQUIRE(fig3f.sweeps[0].axis2.has_value());
    CHECK(fig3f.sweeps[0].axis2->parameter == "Delta_P");
    const auto r = run_sweep(fig3f.sweeps[0], 2);
    CHECK(r.errors.empty());
}
