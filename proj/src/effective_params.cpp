#include "omitlab/effective_params.hpp"

#include "omitlab/errors.hpp"
#include "omitlab/sideband2.hpp"

#include <cmath>
#include <string>

namespace omitlab {

namespace {

cplx checked_ratio(cplx num, cplx den, double scale, double epsilon) {
    if (!(std::abs(den) > 1e-30 * scale)) {
        throw SingularDenominator("effective-parameter denominator vanishes at eps = " + std::to_string(epsilon));
    }
    return num / den;
}

} // namespace

EffectiveLinear effective_linear(const SystemConfig& cfg, const SteadyState& ss, double epsilon) {
    const auto c = first_order_coeffs(cfg, ss, epsilon);
    const double g = cfg.g();
    const double coupling = kHbar * g * g * ss.photon_number();
    const cplx i{0.0, 1.0};
    const cplx den = c.A1 * c.K + i * coupling * std::conj(c.mu_plus);
    const double scale = std::abs(c.A1) * std::abs(c.K) + coupling * std::abs(c.mu_plus);

    EffectiveLinear e;
    e.C1 = coupling == 0.0 ? cplx{} : checked_ratio(c.A1 * coupling, den, scale, epsilon);
    e.Delta_prime = cfg.Delta_L - ss.beta - e.C1.real();
    e.gamma1_prime = cfg.gamma1 + e.C1.imag();
    e.shift = ss.beta + e.C1.real();
    return e;
}

EffectiveSecond effective_second(const SystemConfig& cfg, const SteadyState& ss, const LinearResponse& lr,
                                 double epsilon) {
    const auto first = first_order_coeffs(cfg, ss, epsilon);
    const auto c = second_order_coeffs(cfg, ss, epsilon);
    const double g = cfg.g();
    const double n = ss.photon_number();
    const double coupling = kHbar * g * g * n;
    const cplx i{0.0, 1.0};
    const cplx mu2p_c = std::conj(c.mu2_plus);
    const cplx mup_c = std::conj(first.mu_plus);

    const cplx den = c.A1_2 * first.A1 * c.K2 + i * coupling * first.A1 * mu2p_c;
    const double scale = std::abs(c.A1_2) * std::abs(first.A1) * std::abs(c.K2) +
                         coupling * std::abs(first.A1) * std::abs(c.mu2_plus);

    EffectiveSecond e;
    const cplx X = lr.dx_plus;
    const cplx A = lr.da1_plus;
    if (coupling != 0.0) {
        e.C2 = checked_ratio(coupling * c.A1_2 * first.A1, den, scale, epsilon);
        const cplx bracket = -g * g * n * mu2p_c * mup_c * X * X - i * g * c.A1_2 * std::conj(ss.a1_s) * mup_c * X * A;
        e.B = checked_ratio(i * kHbar * g * g * ss.a1_s * bracket, den, scale, epsilon);
    }
    e.B += i * g * X * A;
    e.Delta_dprime = cfg.Delta_L - ss.beta - e.C2.real();
    e.gamma1_dprime = cfg.gamma1 + e.C2.imag();
    e.shift2 = std::abs(e.C2.real() - effective_linear(cfg, ss, epsilon).C1.real());
    return e;
}

ShiftReport lit_shift_report(const SystemConfig& cfg) {
    ShiftReport r;

    SystemConfig resonant = cfg;
    resonant.Delta_L = 0.0;
    const auto ss_resonant = solve_steady_state(resonant);
    r.shift_Delta_L = 0.0;
    r.shift_epsilon = 0.0;
    r.first = effective_linear(resonant, ss_resonant, r.shift_epsilon);
    r.shift = r.first.shift;
    r.lit_detuning = std::abs(r.shift);

    const auto ss = solve_steady_state(cfg);
    r.shift2_Delta_L = cfg.Delta_L;
    r.shift2_epsilon = cfg.Delta_L;
    const auto lr = linear_response(cfg, ss, r.shift2_epsilon);
    r.second = effective_second(cfg, ss, lr, r.shift2_epsilon);
    r.shift2 = r.second.shift2;
    return r;
}

} // namespace omitlab
