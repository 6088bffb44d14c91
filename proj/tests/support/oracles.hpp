#pragma once

// Reference computations that share no code with the library: a dense
// complex linear solver applied to the linearised equations of motion, a
// fixed-point bisection for the steady state, and a few random-draw helpers.

#include "omitlab/model_params.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <utility>

namespace oracle {

using cplx = std::complex<double>;

template <std::size_t N>
std::array<cplx, N> solve(std::array<std::array<cplx, N>, N> a, std::array<cplx, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const cplx f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::array<cplx, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t c = i + 1; c < N; ++c) {
            s -= a[i][c] * x[c];
        }
        x[i] = s / a[i][i];
    }
    return x;
}

inline double gamma2_total(const omitlab::SystemConfig& c) { return c.gamma2 + c.gamma_tip; }

// Optical amplitudes of the bare coupled pair driven on the left by `drive`:
// (i D1 + g1) a1 - i J a2 = drive, (i D2 + g2') a2 - i J a1 = 0.
inline std::pair<cplx, cplx> optical_fields(const omitlab::SystemConfig& c, double D1, double D2, cplx drive) {
    const cplx i{0.0, 1.0};
    std::array<std::array<cplx, 2>, 2> m{{{i * D1 + c.gamma1, -i * c.J}, {-i * c.J, i * D2 + gamma2_total(c)}}};
    const auto x = solve<2>(m, {drive, 0.0});
    return {x[0], x[1]};
}

inline double optical_T(const omitlab::SystemConfig& c, double D1, double D2) {
    const auto [a1, a2] = optical_fields(c, D1, D2, 1.0);
    (void)a2;
    return std::norm(1.0 - 2.0 * c.gamma1 * a1);
}

// Pumped intracavity field for a given optomechanical shift beta = g x_s.
inline cplx pumped_field(const omitlab::SystemConfig& c, double eps_L, double beta) {
    return optical_fields(c, c.Delta_L - beta, c.Delta_L, eps_L).first;
}

// Smallest non-negative root of beta = (hbar g^2 / m w_m^2) |a1(beta)|^2,
// located on a fine scan and refined by bisection.
inline double bisect_beta(const omitlab::SystemConfig& c, double eps_L) {
    const double g = c.g();
    const double gain = omitlab::kHbar * g * g / (c.m * c.omega_m * c.omega_m);
    auto f = [&](double b) { return b - gain * std::norm(pumped_field(c, eps_L, b)); };
    if (gain == 0.0 || eps_L == 0.0) {
        return 0.0;
    }
    // beta can never exceed gain * (peak |a1|^2) <= gain * (eps_L / min loss)^2 * (1 + J/g2')^2.
    const double loss = std::min(c.gamma1, gamma2_total(c));
    const double bound = gain * std::pow(eps_L / loss * (1.0 + c.J / gamma2_total(c)), 2) * 1.01 + 1.0;
    double lo = 0.0;
    double hi = 0.0;
    const int n = 200000;
    bool found = false;
    for (int k = 1; k <= n; ++k) {
        hi = bound * static_cast<double>(k) / n;
        if (f(hi) >= 0.0) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found) {
        throw std::runtime_error("bisection oracle: no sign change");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Sideband amplitudes at e^{-i w t}: X (displacement), A1, B1 (= conj of the
// e^{+i w t} part of a1), A2, B2.
struct Sideband {
    cplx X, A1, B1, A2, B2;
};

// Linearised equations of motion about (x_s, a1_s) at offset w with
// generic sources on each row.
inline Sideband linear_solve(const omitlab::SystemConfig& c, double x_s, cplx a1s, double w,
                             const std::array<cplx, 5>& src) {
    const cplx i{0.0, 1.0};
    const double g = c.g();
    const double G = omitlab::kHbar * g / c.m;
    const double Dp = c.Delta_L - g * x_s;
    const double g2 = gamma2_total(c);
    std::array<std::array<cplx, 5>, 5> m{};
    // rows: mechanics, a1+, conj a1-, a2+, conj a2-; cols: X, A1, B1, A2, B2
    m[0] = {c.omega_m * c.omega_m - w * w - i * w * c.Gamma_m, -G * std::conj(a1s), -G * a1s, 0.0, 0.0};
    m[1] = {-i * g * a1s, -i * w + i * Dp + c.gamma1, 0.0, -i * c.J, 0.0};
    m[2] = {i * g * std::conj(a1s), 0.0, -i * w - i * Dp + c.gamma1, 0.0, i * c.J};
    m[3] = {0.0, -i * c.J, 0.0, -i * w + i * c.Delta_L + g2, 0.0};
    m[4] = {0.0, 0.0, i * c.J, 0.0, -i * w - i * c.Delta_L + g2};
    const auto x = solve<5>(m, src);
    return {x[0], x[1], x[2], x[3], x[4]};
}

inline Sideband first_order(const omitlab::SystemConfig& c, double x_s, cplx a1s, double eps, double eps_P) {
    return linear_solve(c, x_s, a1s, eps, {0.0, eps_P, 0.0, 0.0, 0.0});
}

inline Sideband second_order(const omitlab::SystemConfig& c, double x_s, cplx a1s, double eps, const Sideband& s1) {
    const cplx i{0.0, 1.0};
    const double g = c.g();
    const double G = omitlab::kHbar * g / c.m;
    return linear_solve(c, x_s, a1s, 2.0 * eps,
                        {G * s1.A1 * s1.B1, i * g * s1.X * s1.A1, -i * g * s1.X * s1.B1, 0.0, 0.0});
}

// Random configurations in a box around the default operating point.
struct Draw {
    omitlab::SystemConfig cfg;
    double epsilon = 0.0;
};

inline Draw random_draw(std::mt19937_64& rng) {
    auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    Draw d;
    auto& c = d.cfg;
    c = omitlab::default_config();
    c.gamma1 = u(3e6, 10e6);
    c.gamma2 = u(3e6, 10e6);
    c.gamma_tip = u(0.0, 60e6);
    c.J = u(5e6, 20e6);
    c.omega_m = omitlab::kTwoPi * u(15e6, 30e6);
    c.Delta_L = c.omega_m * u(0.8, 1.2);
    c.m = u(2e-11, 10e-11);
    c.Gamma_m = u(0.1e6, 0.5e6);
    c.P_L = u(0.1e-3, 2e-3);
    c.probe_ratio = u(1e-3, 0.1);
    d.epsilon = c.Delta_L + u(-20e6, 20e6);
    return d;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

} // namespace oracle
