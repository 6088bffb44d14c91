#pragma once

#include "omitlab/model_params.hpp"
#include "omitlab/omit_response.hpp"
#include "omitlab/steady_state.hpp"

namespace omitlab {

// Probe-side effective detuning and damping of the left resonator at first
// order: (i Delta' + gamma1' - i eps) da1 = i J da2 + eps_P.
struct EffectiveLinear {
    cplx C1{};
    double Delta_prime = 0.0;  // Delta_L - g x_s - Re(C1)
    double gamma1_prime = 0.0; // gamma1 + Im(C1)
    double shift = 0.0;        // g x_s + Re(C1)
};

// Same at second order: (i Delta'' + gamma1'' - 2i eps) da1^(2) = i J da2^(2) + B.
struct EffectiveSecond {
    cplx C2{};
    double Delta_dprime = 0.0;
    double gamma1_dprime = 0.0;
    cplx B{};
    double shift2 = 0.0; // |Re(C2) - Re(C1)| at the same eps
};

EffectiveLinear effective_linear(const SystemConfig& cfg, const SteadyState& ss, double epsilon);
EffectiveSecond effective_second(const SystemConfig& cfg, const SteadyState& ss, const LinearResponse& lr,
                                 double epsilon);

// Where loss-induced transparency is expected once the mechanics is on.
//
// The first-order shift g x_s + Re(C1) is compared against the purely
// optical problem, so it is evaluated with the pump on cavity resonance
// (Delta_L = 0, steady state re-solved there) and the probe at eps = 0.
// The second-order shift |Re(C2) - Re(C1)| is evaluated at the configured
// operating point with the probe on cavity resonance (eps = Delta_L).
struct ShiftReport {
    double shift = 0.0;
    double shift2 = 0.0;
    double lit_detuning = 0.0; // predicted LIT at Delta_P = +/- lit_detuning
    double shift_Delta_L = 0.0;
    double shift_epsilon = 0.0;
    double shift2_Delta_L = 0.0;
    double shift2_epsilon = 0.0;
    EffectiveLinear first{};
    EffectiveSecond second{};
};

ShiftReport lit_shift_report(const SystemConfig& cfg);

} // namespace omitlab
