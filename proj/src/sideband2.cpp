#include "omitlab/sideband2.hpp"

#include "omitlab/errors.hpp"

#include <cmath>
#include <string>

namespace omitlab {

namespace {

constexpr double kSingularRatio = 1e-30;

void require_nonsingular(cplx value, double scale, const char* what, double epsilon) {
    if (!(std::abs(value) > kSingularRatio * scale)) {
        throw SingularDenominator(std::string(what) + " vanishes at eps = " + std::to_string(epsilon));
    }
}

} // namespace

SecondOrderCoeffs second_order_coeffs(const SystemConfig& cfg, const SteadyState& ss, double epsilon) {
    const auto first = first_order_coeffs(cfg, ss, epsilon);
    const double J2 = cfg.J * cfg.J;
    const double right_loss = cfg.gamma2 + cfg.gamma_tip;
    const double g = cfg.g();
    const double coupling = kHbar * g * g * ss.photon_number();
    const cplx i{0.0, 1.0};

    SecondOrderCoeffs c;
    c.mu2_plus = cplx{right_loss, cfg.Delta_L + 2.0 * epsilon};
    c.mu2_minus = cplx{right_loss, cfg.Delta_L - 2.0 * epsilon};
    c.nu2_plus = cplx{cfg.gamma1, cfg.Delta_L - ss.beta + 2.0 * epsilon};
    c.nu2_minus = cplx{cfg.gamma1, cfg.Delta_L - ss.beta - 2.0 * epsilon};
    c.A1_2 = std::conj(c.mu2_plus) * std::conj(c.nu2_plus) + J2;
    c.A2_2 = c.mu2_minus * c.nu2_minus + J2;
    c.K2 = cfg.m * cplx{cfg.omega_m * cfg.omega_m - 4.0 * epsilon * epsilon, -2.0 * epsilon * cfg.Gamma_m};
    c.lambda = i * g * c.mu2_minus * c.K2 * first.A1 * c.A1_2 -
               coupling * g * c.mu2_minus * (first.A1 * std::conj(c.mu2_plus) - std::conj(first.mu_plus) * c.A1_2);
    return c;
}

SecondOrderResponse second_order_amplitude(const SystemConfig& cfg, const SteadyState& ss, const LinearResponse& lr,
                                           double epsilon) {
    SecondOrderResponse out;
    out.eps_P = lr.eps_P;
    if (lr.eps_P == 0.0) {
        return out;
    }
    const auto first = first_order_coeffs(cfg, ss, epsilon);
    const auto c = second_order_coeffs(cfg, ss, epsilon);
    const double g = cfg.g();
    const double n = ss.photon_number();
    const cplx i{0.0, 1.0};
    const cplx mu2p_c = std::conj(c.mu2_plus);

    const cplx X = lr.dx_plus;
    const cplx numerator = -i * kHbar * g * g * g * g * ss.a1_s * n * std::conj(first.mu_plus) * mu2p_c * c.mu2_minus * X * X +
                           c.lambda * X * lr.da1_plus;
    const cplx mech = c.K2 * c.A1_2 * c.A2_2;
    const cplx cross = i * kHbar * g * g * n * (c.A2_2 * mu2p_c - c.A1_2 * c.mu2_minus);
    const cplx denominator = first.A1 * (mech + cross);
    const double scale = std::abs(first.A1) * (std::abs(mech) + kHbar * g * g * n *
                                                                    (std::abs(c.A2_2) * std::abs(c.mu2_plus) +
                                                                     std::abs(c.A1_2) * std::abs(c.mu2_minus)));
    require_nonsingular(denominator, scale, "second-order denominator", epsilon);

    out.da1_plus_2 = numerator / denominator;
    out.da2_plus_2 = i * cfg.J * out.da1_plus_2 / c.mu2_minus;
    out.eta = std::abs(-2.0 * cfg.gamma1 * out.da1_plus_2 / lr.eps_P);
    return out;
}

cplx second_order_amplitude_direct(const SystemConfig& cfg, const SteadyState& ss, const LinearResponse& lr,
                                   double epsilon) {
    const auto first = first_order_coeffs(cfg, ss, epsilon);
    const auto c = second_order_coeffs(cfg, ss, epsilon);
    const double g = cfg.g();
    const double n = ss.photon_number();
    const cplx i{0.0, 1.0};
    const cplx a = ss.a1_s;
    const cplx X = lr.dx_plus;
    const cplx A = lr.da1_plus;
    // Conjugate of the first-order lower sideband amplitude.
    const cplx A_minus_c = -i * g * std::conj(a) * X * std::conj(first.mu_plus) / first.A1;

    const cplx D2 = c.K2 * c.A1_2 * c.A2_2 + i * kHbar * g * g * n * (std::conj(c.mu2_plus) * c.A2_2 - c.mu2_minus * c.A1_2);
    const cplx X2 = kHbar * g *
                    (i * g * std::conj(a) * c.mu2_minus * X * A * c.A1_2 -
                     i * g * a * std::conj(c.mu2_plus) * X * A_minus_c * c.A2_2 + A * A_minus_c * c.A1_2 * c.A2_2) /
                    D2;
    return c.mu2_minus * (i * g * a * X2 + i * g * X * A) / c.A2_2;
}

std::vector<SidebandPoint> sideband_spectrum(const SystemConfig& cfg, std::span<const double> Delta_P_grid) {
    if (Delta_P_grid.empty()) {
        throw InvalidSpec("sideband_spectrum needs a non-empty grid");
    }
    const auto ss = solve_steady_state(cfg);
    std::vector<SidebandPoint> out;
    out.reserve(Delta_P_grid.size());
    for (double dp : Delta_P_grid) {
        const double eps = ProbeSetting::from_detuning(dp, cfg.Delta_L).epsilon();
        const auto lr = linear_response(cfg, ss, eps);
        out.push_back({dp, second_order_amplitude(cfg, ss, lr, eps).eta});
    }
    return out;
}

} // namespace omitlab
