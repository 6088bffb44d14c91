#include "omitlab/errors.hpp"
#include "omitlab/steady_state.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace omitlab;

TEST_CASE("default operating point") {
    const auto cfg = default_config();
    const auto ss = solve_steady_state(cfg);
    const double eps_L = drive_amplitudes(cfg).eps_L;
    // Frozen from the bisection reference.
    CHECK(ss.beta == doctest::Approx(90562.3682632389).epsilon(1e-10));
    CHECK(ss.beta == doctest::Approx(oracle::bisect_beta(cfg, eps_L)).epsilon(1e-10));
    CHECK(ss.x_s > 0.0);
    CHECK(ss.x_s == doctest::Approx(ss.beta / cfg.g()).epsilon(1e-15));
    CHECK(ss.residual < 1e-10);
    CHECK_FALSE(ss.bistable);

    const auto roots = real_roots(steady_state_cubic(cfg, eps_L));
    int in_window = 0;
    for (double r : roots) {
        in_window += (r >= 0.0 && r <= cfg.Delta_L) ? 1 : 0;
    }
    CHECK(in_window == 1);
}

TEST_CASE("self-consistency and field ratio") {
    const auto cfg = default_config();
    const auto ss = solve_steady_state(cfg);
    const auto a1 = oracle::pumped_field(cfg, ss.eps_L, cfg.g() * ss.x_s);
    CHECK(oracle::rel(ss.a1_s, a1) <= 1e-10);
    const std::complex<double> i{0.0, 1.0};
    const auto ratio = i * cfg.J / (i * cfg.Delta_L + cfg.gamma2 + cfg.gamma_tip);
    CHECK(oracle::rel(ss.a2_s / ss.a1_s, ratio) <= 1e-14);
}

TEST_CASE("no coupling or no drive") {
    auto cfg = default_config();
    cfg.g_explicit = 0.0;
    const auto ss = solve_steady_state(cfg);
    CHECK(ss.x_s == 0.0);
    const std::complex<double> i{0.0, 1.0};
    const double eps_L = drive_amplitudes(cfg).eps_L;
    const double g2 = cfg.gamma2 + cfg.gamma_tip;
    const auto expected = eps_L * (i * cfg.Delta_L + g2) /
                          ((i * cfg.Delta_L + cfg.gamma1) * (i * cfg.Delta_L + g2) + cfg.J * cfg.J);
    CHECK(oracle::rel(ss.a1_s, expected) <= 1e-14);
    const auto cubic = steady_state_cubic(cfg, eps_L);
    const auto roots = real_roots(cubic);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == 0.0);

    cfg = default_config();
    cfg.P_L = 0.0;
    const auto off = solve_steady_state(cfg);
    CHECK(off.x_s == 0.0);
    CHECK(off.a1_s == std::complex<double>{});
    CHECK(off.a2_s == std::complex<double>{});
    CHECK(off.residual == 0.0);
    const auto roots0 = real_roots(steady_state_cubic(cfg, 0.0));
    REQUIRE(roots0.size() == 1);
    CHECK(roots0[0] == 0.0);
}

TEST_CASE("right-hand field vanishes for large tip loss") {
    auto cfg = default_config();
    double last = std::abs(solve_steady_state(cfg).a2_s);
    for (double tip : {1e8, 1e9, 1e10, 1e11, 1e12}) {
        cfg.gamma_tip = tip;
        const double now = std::abs(solve_steady_state(cfg).a2_s);
        CHECK(now < last);
        last = now;
    }
    CHECK(last < 1e-3 * std::abs(solve_steady_state(default_config()).a2_s));
}

TEST_CASE("cubic root matches the bisection reference on random draws") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    while (checked < 100) {
        const auto cfg = oracle::random_draw(rng).cfg;
        const auto ss = solve_steady_state(cfg);
        const double ref = oracle::bisect_beta(cfg, ss.eps_L);
        CHECK(ss.beta == doctest::Approx(ref).epsilon(1e-8));
        CHECK(ss.residual <= 1e-10);
        ++checked;
    }
}

TEST_CASE("cubic coefficients describe the fixed-point map") {
    const auto cfg = default_config();
    const double eps_L = drive_amplitudes(cfg).eps_L;
    const auto cubic = steady_state_cubic(cfg, eps_L);
    const double gain = fixed_point_gain(cfg);
    for (double beta : {0.0, 1e4, 9e4, 1e6, 5e7}) {
        // cubic(b) is proportional to b - gain |a1(b)|^2 with a positive factor.
        const double f = beta - gain * std::norm(oracle::pumped_field(cfg, eps_L, beta));
        CHECK(std::signbit(cubic(beta)) == std::signbit(f));
    }
}

TEST_CASE("strong pump is flagged bistable and returns the lowest branch") {
    auto cfg = default_config();
    cfg.P_L = 5e-3;
    const auto ss = solve_steady_state(cfg);
    const auto roots = real_roots(steady_state_cubic(cfg, ss.eps_L));
    int nonneg = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (double r : roots) {
        if (r >= 0.0) {
            ++nonneg;
            lowest = std::min(lowest, r);
        }
    }
    CHECK(nonneg == 3);
    CHECK(ss.bistable);
    CHECK(ss.beta == doctest::Approx(lowest).epsilon(1e-10));
    CHECK(ss.beta == doctest::Approx(oracle::bisect_beta(cfg, ss.eps_L)).epsilon(1e-8));
}
