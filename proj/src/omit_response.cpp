#include "omitlab/omit_response.hpp"

#include "omitlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace omitlab {

namespace {
constexpr double kSingularRatio = 1e-30;
}

FirstOrderCoeffs first_order_coeffs(const SystemConfig& cfg, const SteadyState& ss, double epsilon) {
    const double J2 = cfg.J * cfg.J;
    const double right_loss = cfg.gamma2 + cfg.gamma_tip;
    FirstOrderCoeffs c;
    c.mu_plus = cplx{right_loss, cfg.Delta_L + epsilon};
    c.mu_minus = cplx{right_loss, cfg.Delta_L - epsilon};
    c.nu_plus = cplx{cfg.gamma1, cfg.Delta_L - ss.beta + epsilon};
    c.nu_minus = cplx{cfg.gamma1, cfg.Delta_L - ss.beta - epsilon};
    c.A1 = std::conj(c.mu_plus) * std::conj(c.nu_plus) + J2;
    c.A2 = c.mu_minus * c.nu_minus + J2;
    c.K = cfg.m * cplx{cfg.omega_m * cfg.omega_m - epsilon * epsilon, -epsilon * cfg.Gamma_m};
    return c;
}

LinearResponse linear_response(const SystemConfig& cfg, const SteadyState& ss, double epsilon) {
    return linear_response(cfg, ss, epsilon, drive_amplitudes(cfg).eps_P);
}

LinearResponse linear_response(const SystemConfig& cfg, const SteadyState& ss, double epsilon, double eps_P) {
    const auto c = first_order_coeffs(cfg, ss, epsilon);
    const double g = cfg.g();
    const double coupling = kHbar * g * g * ss.photon_number(); // hbar g^2 |a1_s|^2
    const cplx i{0.0, 1.0};
    const cplx mu_plus_c = std::conj(c.mu_plus);

    const cplx mech = c.K * c.A1 * c.A2;
    const cplx cross = i * coupling * (mu_plus_c * c.A2 - c.mu_minus * c.A1);
    const cplx denom = mech + cross;
    const double scale = std::abs(mech) + coupling * (std::abs(c.mu_plus) * std::abs(c.A2) +
                                                      std::abs(c.mu_minus) * std::abs(c.A1));
    if (!(std::abs(denom) > kSingularRatio * scale)) {
        throw SingularDenominator("first-order denominator vanishes at eps = " + std::to_string(epsilon));
    }

    // Responses per unit probe amplitude.
    const cplx x_unit = kHbar * g * std::conj(ss.a1_s) * c.mu_minus * c.A1 / denom;
    const cplx a_unit = c.mu_minus * (c.K * c.A1 + i * coupling * mu_plus_c) / denom;

    LinearResponse r;
    r.epsilon = epsilon;
    r.eps_P = eps_P;
    r.dx_plus = eps_P * x_unit;
    r.da1_plus = eps_P * a_unit;
    r.da2_plus = i * cfg.J * r.da1_plus / c.mu_minus;
    r.t_P = 1.0 - 2.0 * cfg.gamma1 * a_unit;
    r.T_P = std::norm(r.t_P);
    return r;
}

LinearResponse probe_transmission(const SystemConfig& cfg, double Delta_P) {
    const auto ss = solve_steady_state(cfg);
    return linear_response(cfg, ss, ProbeSetting::from_detuning(Delta_P, cfg.Delta_L).epsilon());
}

double group_delay(const SystemConfig& cfg, double Delta_P, double step) {
    return group_delay(cfg, solve_steady_state(cfg), Delta_P, step);
}

double group_delay(const SystemConfig& cfg, const SteadyState& ss, double Delta_P, double step) {
    if (!(step > 0.0)) {
        throw InvalidSpec("group_delay step must be > 0");
    }
    auto t_at = [&](double dp) {
        return linear_response(cfg, ss, ProbeSetting::from_detuning(dp, cfg.Delta_L).epsilon(), 1.0).t_P;
    };
    // arg of the ratio is the phase increment unwrapped into (-pi, pi].
    auto central = [&](double h) { return std::arg(t_at(Delta_P + h) * std::conj(t_at(Delta_P - h))) / (2.0 * h); };
    const double coarse = central(step);
    const double fine = central(0.5 * step);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() / step;
    if (std::abs(coarse - fine) > 1e-3 * std::abs(extrapolated) + roundoff) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "group delay not converged at Delta_P = %.9g (levels %.6g vs %.6g)", Delta_P,
                      coarse, fine);
        throw NonConverged(buf);
    }
    return extrapolated;
}

} // namespace omitlab
